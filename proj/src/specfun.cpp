#include "sdwave/specfun.hpp"

#include <cmath>
#include <numbers>

#include "sdwave/error.hpp"

namespace sdwave {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTailExponent = 45.0;

// exp(-t (cosh z - 1)) cosh(nu z), assembled in log form.
double scaled_bessel_integrand(double nu, double t, double z) {
  const double s = std::sinh(0.5 * z);
  const double anz = std::abs(nu) * z;
  return 0.5 * std::exp(-2.0 * t * s * s + anz) * (1.0 + std::exp(-2.0 * anz));
}

double bessel_cutoff(double nu, double t) {
  auto excess = [&](double z) {
    const double s = std::sinh(0.5 * z);
    return 2.0 * t * s * s - std::abs(nu) * z - kTailExponent;
  };
  double hi = 1.0;
  while (excess(hi) < 0.0) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    (excess(mid) < 0.0 ? lo : hi) = mid;
  }
  return hi;
}

}  // namespace

double sphere_area(int k) {
  detail::require(k >= 0, "sphere_area: k must be >= 0");
  const double m = 0.5 * (k + 1);
  return 2.0 * std::pow(kPi, m) / std::tgamma(m);
}

double ball_volume(int n) {
  detail::require(n >= 1, "ball_volume: n must be >= 1");
  return std::pow(kPi, 0.5 * n) / std::tgamma(0.5 * n + 1.0);
}

BesselEval bessel_k_eval(double nu, double t, const QuadratureOptions &opt) {
  if (!(t > 0.0)) throw InvalidArgument("bessel_k: argument must be positive");
  const double zmax = bessel_cutoff(nu, t);
  auto q = adaptive_simpson([&](double z) { return scaled_bessel_integrand(nu, t, z); }, 0.0,
                            zmax, opt);
  BesselEval out;
  out.nu = nu;
  out.t = t;
  out.log_value = std::log(q.value) - t;
  out.value = std::exp(out.log_value);
  out.rel_err_estimate = q.error / q.value;
  out.accuracy_warning = !q.converged || out.rel_err_estimate > opt.rel_tol;
  return out;
}

double bessel_k(double nu, double t) { return bessel_k_eval(nu, t).value; }

double log_bessel_k(double nu, double t) { return bessel_k_eval(nu, t).log_value; }

std::pair<double, double> bessel_k_derivative_residuals(double nu, double t, double h) {
  detail::require(h > 0.0 && t > h, "bessel_k_derivative_residuals: need t > h > 0");
  const double fd = (bessel_k(nu, t + h) - bessel_k(nu, t - h)) / (2.0 * h);
  const double k = bessel_k(nu, t);
  const double kp = bessel_k(nu + 1.0, t);
  const double km = bessel_k(nu - 1.0, t);
  return {std::abs(fd - (-kp + nu / t * k)), std::abs(fd + 0.5 * (kp + km))};
}

double log_lambda(double mu, double t) {
  detail::require(t >= 0.0, "lambda: t must be >= 0");
  const double s = 1.0 + t;
  return 0.5 * (mu + 1.0) * std::log(s) + log_bessel_k(0.5 * (mu - 1.0), s);
}

double lambda_fn(double mu, double t) { return std::exp(log_lambda(mu, t)); }

double lambda_prime(double mu, double t) {
  detail::require(t >= 0.0, "lambda_prime: t must be >= 0");
  const double s = 1.0 + t;
  const double ls = std::log(s);
  const double a = std::log(mu) + 0.5 * (mu - 1.0) * ls + log_bessel_k(0.5 * (mu - 1.0), s);
  const double b = 0.5 * (mu + 1.0) * ls + log_bessel_k(0.5 * (mu + 1.0), s);
  return std::exp(a) - std::exp(b);
}

double log_phi_radial(int n, double r, const QuadratureOptions &opt) {
  detail::require(n >= 2, "phi_radial: n must be >= 2");
  detail::require(r >= 0.0, "phi_radial: r must be >= 0");
  const int k = n - 2;
  auto integrand = [&](double th) {
    const double s = std::sin(0.5 * th);
    const double w = k == 0 ? 1.0 : std::pow(std::sin(th), k);
    return std::exp(-2.0 * r * s * s) * w;
  };
  double integral = 0.0;
  if (r > 16.0) {
    // the mass sits within a few r^{-1/2} of th = 0
    const double split = std::min(kPi, 12.0 / std::sqrt(r));
    integral = adaptive_simpson(integrand, 0.0, split, opt).value;
    if (split < kPi) integral += adaptive_simpson(integrand, split, kPi, opt).value;
  } else {
    integral = adaptive_simpson(integrand, 0.0, kPi, opt).value;
  }
  return std::log(sphere_area(k)) + r + std::log(integral);
}

double phi_radial(int n, double r) { return std::exp(log_phi_radial(n, r)); }

double log_psi(double mu, int n, double t, double r) { return log_lambda(mu, t) + log_phi_radial(n, r); }

double psi(double mu, int n, double t, double r) { return std::exp(log_psi(mu, n, t, r)); }

TestFunction::TestFunction(double mu, int n) : mu_(mu), n_(n) {
  detail::require(mu > 0.0, "TestFunction: mu must be positive");
  detail::require(n >= 2, "TestFunction: n must be >= 2");
}

}  // namespace sdwave
