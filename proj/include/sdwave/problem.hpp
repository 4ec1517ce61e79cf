#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

namespace sdwave {

/// Radial bump amplitude * (1 - r^2/R^2)_+^k.
struct BumpProfile {
  double amplitude = 1.0;
  int k = 3;

  double operator()(double r, double R) const;
};

struct GridParams {
  double dr = 1.0 / 256.0;
  double cfl = 0.9;
  double t_max = 100.0;
  int output_stride = 4;  ///< record functionals every this many time steps
};

/// Full problem instance for the damped semilinear wave equation
///   u_tt - Laplace u + mu/(1+t) u_t = |u|^p,  u(0) = eps f, u_t(0) = eps g
/// in R^n with radial data supported in |x| <= R.
struct ProblemSpec {
  int n = 3;
  double mu = 2.0;
  double p = 1.5;
  double R = 1.0;
  BumpProfile f;
  BumpProfile g;
  GridParams grid;
  double blowup_threshold = 1e6;

  /// Throws ConfigError when a hypothesis of the blow-up theorem or a grid
  /// constraint is violated.
  void validate() const;
};

/// Flat `key = value` text, `#` starts a comment. Unknown keys are rejected.
/// Keys: n, mu, p, R, f_amplitude, f_k, g_amplitude, g_k, dr, cfl, t_max,
/// output_stride, blowup_threshold. Missing keys keep their defaults.
ProblemSpec parse_problem(std::istream &in);
ProblemSpec load_problem(const std::filesystem::path &path);

/// Canonical `key = value` lines for every field (round-trips through parse_problem).
std::string echo_problem(const ProblemSpec &spec);

/// Shortest round-trip decimal form of a double.
std::string format_double(double x);

}  // namespace sdwave
