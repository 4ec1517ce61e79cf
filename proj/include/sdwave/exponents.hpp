#pragma once

#include <optional>
#include <string>

namespace sdwave {

/// gamma(p, d) = 2 + (d+1) p - (d-1) p^2. Requires d > 1, p > 0.
double gamma(double p, double d);

/// Positive root of gamma(., d). Requires d > 1.
double strauss_exponent(double d);

/// 1 + 2/n. Requires n >= 1.
double fujita_exponent(int n);

/// (n^2 + n + 2) / (n + 2). Requires n >= 1.
double mu_star(int n);

/// Outcome of an inequality whose two sides may be undefined on part of
/// the parameter range.
enum class Tristate { holds, fails, not_applicable };

std::string to_string(Tristate s);

/// A power-law lifespan exponent k in T <= C eps^{-k}, together with the
/// applicability of the hypothesis range it was stated for.
struct CompetingExponent {
  bool applicable = false;
  double exponent = 0.0;  ///< meaningful only when applicable
  std::string condition;  ///< human-readable hypothesis range
};

/// Regimes of the hypergeometric-method lifespan bounds. The arbitrary
/// small delta is kept symbolic: `exponent` is the power without delta.
enum class IsRegime {
  not_applicable,
  critical_exp,        ///< p = p_S(n+mu): T <= exp(C eps^{-p(p-1)})
  strauss_delta,       ///< power 2p(p-1)/gamma(p,n+mu) + delta
  unit_delta,          ///< n >= 2: power 1 + delta
  one_d_mass_delta,    ///< n = 1: power 2(p-1)/mu + delta
};

struct IsExponent {
  IsRegime regime = IsRegime::not_applicable;
  double exponent = 0.0;  ///< power before "+ delta"; for critical_exp, p(p-1)
  std::string descriptor;
};

std::string to_string(IsRegime r);

struct RemarkCheck {
  bool in_range = false;     ///< p lies in the stated improvement range
  Tristate inequality = Tristate::not_applicable;
  double this_exponent = 0.0;   ///< 2p(p-1)/gamma(p, n+mu)
  double wakasugi_exponent = 0.0;
  int which = 0;  ///< 5 for the mu > 1 branch, 6 for the mu <= 1 branch, 0 if neither
  std::string reason;
};

/// Membership test for the sub-Fujita improvement ranges plus a direct numerical
/// comparison of the two lifespan exponents there.
RemarkCheck remark_improvement_check(int n, double mu, double p);

struct ExponentReport {
  int n = 0;
  double mu = 0.0;
  double p = 0.0;
  double gamma_shifted = 0.0;       ///< gamma(p, n+mu)
  double p_strauss_shifted = 0.0;   ///< p_S(n+mu)
  double p_fujita = 0.0;            ///< p_F(n)
  double mu_star = 0.0;
  double lifespan_exp_this_paper = 0.0;  ///< +inf when p >= p_S(n+mu)
  CompetingExponent lifespan_exp_ltw;
  IsExponent lifespan_exp_is;
  CompetingExponent lifespan_exp_wakasugi;
  bool remark_improvement = false;
  RemarkCheck remark;
};

/// Fills every field of ExponentReport. Requires n >= 1, mu > 0, p > 1.
ExponentReport lifespan_exponent_table(int n, double mu, double p);

}  // namespace sdwave
