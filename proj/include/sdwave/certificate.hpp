#pragma once

#include <string>
#include <vector>

#include "sdwave/problem.hpp"
#include "sdwave/quadrature.hpp"

namespace sdwave {

struct CertificateOptions {
  QuadratureOptions quad{};
  /// C_phi envelope search: t = 0 plus `phi_grid_points` log-spaced values up to `phi_grid_tmax`.
  int phi_grid_points = 120;
  double phi_grid_tmin = 1e-2;
  double phi_grid_tmax = 200.0;
};

/// Every explicit constant of the blow-up argument for one ProblemSpec.
struct Certificate {
  ProblemSpec spec;
  CertificateOptions options;

  double c0 = 0.0;
  double c_fg = 0.0;
  double c_phi = 0.0;    ///< envelope constant before the R adjustment
  double c_phi_r = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  double c3 = 0.0;
  double c4 = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double s_p_inf = 0.0;
  double t0 = 0.0;
  double gamma = 0.0;              ///< gamma(p, n+mu)
  double lifespan_exponent = 0.0;  ///< 2p(p-1)/gamma

  /// Blow-up time bound max{T0 + (e^{S + alpha log 2 + 1} / (C2 eps^p))^{2(p-1)/gamma}, 2T0 + 1}.
  double threshold(double eps) const;

  /// Index above which the closed-form D_j bound is valid:
  /// floor(p log C3 / (2 log p) - 1/(p-1)) + 1.
  int validity_index() const;

  /// J(t) = log D1 - S_p(inf) - alpha log(1+t) + beta log(t - T0), D1 = C2 eps^p. Requires t > T0.
  double J(double eps, double t) const;

  /// Largest eps for which the power branch of threshold() exceeds ten times
  /// the 2T0 + 1 floor.
  double eps0() const;
};

/// Smallest t on the half-step scan {2.5, 3, ..., 100} from which on (through the
/// end of the scan) |K_nu(1+t) sqrt(2(1+t)/pi) e^{1+t} - 1| <= 0.1 for
/// nu = (mu +- 1)/2 and the kernel integral bound used for C1 holds.
/// Throws ComputationError if the scan is exhausted.
double compute_T0(double mu);

/// log of int_0^t ds / ((1+s) K^2_{(mu-1)/2}(1+s)) at each of the increasing times.
std::vector<double> log_inverse_weight_integral(double mu, const std::vector<double> &times,
                                                const QuadratureOptions &opt = {});

/// C_fg = int (g lambda(0) + K_{(mu+1)/2}(1) f) phi dx over the data support.
double compute_c_fg(const ProblemSpec &spec, const QuadratureOptions &opt = {});

/// Envelope constant C_phi = max_t [int_{|x|<=t+R} phi^{p'} dx] / [(R+t)^{n-1-(n-1)p'/2} e^{p'(t+R)}].
double compute_c_phi(const ProblemSpec &spec, const CertificateOptions &opt = {});

/// The data-independent part: gamma, lifespan_exponent, C0, alpha, beta, C3 and
/// S_p(inf). The remaining constants stay zero.
Certificate exponent_constants(const ProblemSpec &spec);

/// Throws ConfigError when the spec is invalid or the data vanish identically.
Certificate compute_constants(const ProblemSpec &spec, const CertificateOptions &opt = {});

struct IterationState {
  int j = 1;
  double log_D = 0.0;
  double a = 0.0;
  double b = 0.0;
};

/// Iterates a_{j+1} = mu + n(p-1) + p a_j, b_{j+1} = mu + 2 + p b_j and
/// log D_{j+1} = p log D_j + log C0 - 2 log(mu + p b_j + 2) from
/// D1 = C2 eps^p, a1 = mu + (n+mu-1)p/2, b1 = n+mu+1. Returns states j = 1..j_max.
std::vector<IterationState> iterate_sequences(const Certificate &cert, double eps, int j_max);

/// a_j = alpha p^{j-1} - (n + mu/(p-1)).
double a_closed_form(const Certificate &cert, int j);
/// b_j = beta p^{j-1} - (mu+2)/(p-1).
double b_closed_form(const Certificate &cert, int j);

/// sum_{k=1}^{j-1} k p^{j-1-k} in closed form.
double weighted_power_sum(double p, int j);
/// sum_{k=1}^{j-1} p^k in closed form.
double geometric_power_sum(double p, int j);

struct DjBound {
  double log_bound = 0.0;
  int validity_index = 0;
  bool index_too_small = false;
};

/// p^{j-1} (log D1 - S_p(inf)). The bound is returned even below the validity index, flagged.
DjBound log_Dj_lower_bound(const Certificate &cert, double eps, int j);

struct LifespanBound {
  double t_bound = 0.0;       ///< threshold(eps)
  double t_asymptotic = 0.0;  ///< C4 eps^{-lifespan_exponent}
  double eps0 = 0.0;
};

LifespanBound lifespan_bound(const Certificate &cert, double eps);

/// JSON with fields c0, c_fg, c_phi_r, c1, c2, c3, c4, alpha, beta, s_p_inf, t0,
/// gamma, lifespan_exponent plus provenance (spec echo, tolerances, resolutions).
std::string certificate_to_json(const Certificate &cert);
Certificate certificate_from_json(const std::string &text);

}  // namespace sdwave
