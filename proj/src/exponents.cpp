#include "sdwave/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "sdwave/error.hpp"

namespace sdwave {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRootTol = 1e-10;

std::string fmt(double x) {
  std::ostringstream os;
  os.precision(10);
  os << x;
  return os.str();
}

// 2p(p-1)/gamma(p, d), +inf once gamma has reached zero.
double power_exponent(double p, double d) {
  const double g = gamma(p, d);
  return g > 0.0 ? 2.0 * p * (p - 1.0) / g : kInf;
}

}  // namespace

double gamma(double p, double d) {
  detail::require(d > 1.0, "gamma: dimension argument must exceed 1");
  detail::require(p > 0.0, "gamma: p must be positive");
  return 2.0 + (d + 1.0) * p - (d - 1.0) * p * p;
}

double strauss_exponent(double d) {
  detail::require(d > 1.0, "strauss_exponent: d must exceed 1");
  double p = (d + 1.0 + std::sqrt(d * d + 10.0 * d - 7.0)) / (2.0 * (d - 1.0));
  // One Newton step on gamma removes the cancellation in the radical.
  const double slope = (d + 1.0) - 2.0 * (d - 1.0) * p;
  p -= gamma(p, d) / slope;
  return p;
}

double fujita_exponent(int n) {
  detail::require(n >= 1, "fujita_exponent: n must be >= 1");
  return 1.0 + 2.0 / n;
}

double mu_star(int n) {
  detail::require(n >= 1, "mu_star: n must be >= 1");
  return static_cast<double>(n * n + n + 2) / (n + 2);
}

std::string to_string(Tristate s) {
  switch (s) {
    case Tristate::holds: return "holds";
    case Tristate::fails: return "fails";
    case Tristate::not_applicable: return "not-applicable";
  }
  return "?";
}

std::string to_string(IsRegime r) {
  switch (r) {
    case IsRegime::not_applicable: return "not-applicable";
    case IsRegime::critical_exp: return "critical-exp";
    case IsRegime::strauss_delta: return "strauss-delta";
    case IsRegime::unit_delta: return "unit-delta";
    case IsRegime::one_d_mass_delta: return "one-d-mass-delta";
  }
  return "?";
}

RemarkCheck remark_improvement_check(int n, double mu, double p) {
  detail::require(n >= 1, "remark_improvement_check: n must be >= 1");
  detail::require(mu > 0.0, "remark_improvement_check: mu must be positive");
  detail::require(p > 1.0, "remark_improvement_check: p must exceed 1");

  RemarkCheck out;
  const double d = n + mu;
  const double g = gamma(p, d);
  out.this_exponent = g > 0.0 ? 2.0 * p * (p - 1.0) / g : kInf;

  double wak_den = 0.0;
  if (mu > 1.0) {
    out.which = 5;
    wak_den = 2.0 - n * (p - 1.0);
  } else {
    out.which = 6;
    wak_den = 2.0 - (n + mu - 1.0) * (p - 1.0);
  }
  if (wak_den > 0.0) out.wakasugi_exponent = (p - 1.0) / wak_den;

  if (g <= 0.0 || wak_den <= 0.0) {
    out.inequality = Tristate::not_applicable;
  } else {
    out.inequality = out.this_exponent < out.wakasugi_exponent ? Tristate::holds : Tristate::fails;
  }

  if (n < 2) {
    out.reason = "requires n >= 2";
    return out;
  }
  const double ms = mu_star(n);
  if (mu > 1.0) {
    if (mu >= ms) {
      out.reason = "mu >= mu_*(n) = " + fmt(ms);
      return out;
    }
    const double lo = std::max(1.0, 2.0 / (n + 1.0 - mu));
    const double hi = fujita_exponent(n);
    out.in_range = p > lo && p < hi;
    if (!out.in_range) out.reason = "p outside (" + fmt(lo) + ", " + fmt(hi) + ")";
  } else {
    const double lo = std::max(1.0, 2.0 / (n + mu - 1.0));
    const double hi = 1.0 + 2.0 / (n + mu - 1.0);
    out.in_range = p > lo && p < hi;
    if (!out.in_range) out.reason = "p outside (" + fmt(lo) + ", " + fmt(hi) + ")";
  }
  if (out.in_range) out.reason = "in range; inequality " + to_string(out.inequality);
  return out;
}

ExponentReport lifespan_exponent_table(int n, double mu, double p) {
  detail::require(n >= 1, "lifespan_exponent_table: n must be >= 1");
  detail::require(mu > 0.0, "lifespan_exponent_table: mu must be positive");
  detail::require(p > 1.0, "lifespan_exponent_table: p must exceed 1");

  ExponentReport r;
  r.n = n;
  r.mu = mu;
  r.p = p;
  const double d = n + mu;
  r.gamma_shifted = gamma(p, d);
  r.p_strauss_shifted = strauss_exponent(d);
  r.p_fujita = fujita_exponent(n);
  r.mu_star = mu_star(n);
  r.lifespan_exp_this_paper = p < r.p_strauss_shifted ? power_exponent(p, d) : kInf;

  // Lai-Takamura-Wakasa
  {
    const double mu_cap = static_cast<double>(n * n + n + 2) / (2.0 * (n + 2));
    const double p_hi = strauss_exponent(n + 2.0 * mu);
    auto &e = r.lifespan_exp_ltw;
    e.condition = "0 < mu < " + fmt(mu_cap) + " and " + fmt(r.p_fujita) + " <= p < " + fmt(p_hi);
    e.applicable = mu < mu_cap && p >= r.p_fujita && p < p_hi;
    if (e.applicable) e.exponent = power_exponent(p, n + 2.0 * mu);
  }

  // Ikeda-Sobajima
  {
    auto &e = r.lifespan_exp_is;
    const double ps = r.p_strauss_shifted;
    if (n >= 2) {
      const double ps2 = strauss_exponent(d + 2.0);
      if (mu >= r.mu_star) {
        e.descriptor = "requires mu < mu_* = " + fmt(r.mu_star);
      } else if (std::abs(p - ps) <= kRootTol) {
        e.regime = IsRegime::critical_exp;
        e.exponent = p * (p - 1.0);
        e.descriptor = "T <= exp(C eps^-" + fmt(e.exponent) + ")";
      } else if (p >= ps2 && p < ps) {
        e.regime = IsRegime::strauss_delta;
        e.exponent = power_exponent(p, d);
        e.descriptor = "T <= C_delta eps^-(" + fmt(e.exponent) + " + delta), delta > 0 arbitrary";
      } else if (p >= r.p_fujita && p < ps2) {
        e.regime = IsRegime::unit_delta;
        e.exponent = 1.0;
        e.descriptor = "T <= C'_delta eps^-(1 + delta), delta > 0 arbitrary";
      } else {
        e.descriptor = "p outside the stated ranges";
      }
    } else {
      if (!(mu < 4.0 / 3.0)) {
        e.descriptor = "requires 0 < mu < 4/3 for n = 1";
      } else if (std::abs(p - ps) <= kRootTol) {
        e.regime = IsRegime::critical_exp;
        e.exponent = p * (p - 1.0);
        e.descriptor = "T <= exp(C eps^-" + fmt(e.exponent) + ")";
      } else if (p >= std::max(3.0, 2.0 / mu) && p < ps) {
        e.regime = IsRegime::strauss_delta;
        e.exponent = power_exponent(p, d);
        e.descriptor = "T <= C_delta eps^-(" + fmt(e.exponent) + " + delta), delta > 0 arbitrary";
      } else if (mu < 2.0 / 3.0 && p >= 3.0 && p < 2.0 / mu) {
        e.regime = IsRegime::one_d_mass_delta;
        e.exponent = 2.0 * (p - 1.0) / mu;
        e.descriptor = "T <= C'_delta eps^-(" + fmt(e.exponent) + " + delta), delta > 0 arbitrary";
      } else {
        e.descriptor = "p outside the stated ranges";
      }
    }
  }

  // Wakasugi
  {
    auto &e = r.lifespan_exp_wakasugi;
    if (mu > 1.0) {
      e.condition = "mu > 1 and 1 < p < " + fmt(r.p_fujita);
      e.applicable = p < r.p_fujita;
      if (e.applicable) e.exponent = (p - 1.0) / (2.0 - n * (p - 1.0));
    } else {
      const double hi = 1.0 + 2.0 / (n + mu - 1.0);
      e.condition = "0 < mu <= 1 and 1 < p < " + fmt(hi);
      e.applicable = p < hi;
      if (e.applicable) e.exponent = (p - 1.0) / (2.0 - (n + mu - 1.0) * (p - 1.0));
    }
  }

  r.remark = remark_improvement_check(n, mu, p);
  r.remark_improvement = r.remark.in_range && r.remark.inequality == Tristate::holds;
  return r;
}

}  // namespace sdwave
