#pragma once

#include <utility>

#include "sdwave/quadrature.hpp"

namespace sdwave {

/// Surface measure |S^{k}| of the unit k-sphere in R^{k+1}.
double sphere_area(int k);

/// Volume of the unit ball in R^n.
double ball_volume(int n);

struct BesselEval {
  double nu = 0.0;
  double t = 0.0;
  double value = 0.0;
  double log_value = 0.0;
  double rel_err_estimate = 0.0;
  bool accuracy_warning = false;
};

/// K_nu(t) from the integral representation int_0^inf exp(-t cosh z) cosh(nu z) dz.
///
/// The quadrature runs on exp(t) exp(-t cosh z) cosh(nu z) over [0, Z], with Z
/// chosen so that the truncated tail sits below e^-45 of the integrand scale;
/// the e^-t factor is carried in log form, so log_value stays finite for any t.
/// Throws InvalidArgument for t <= 0.
BesselEval bessel_k_eval(double nu, double t, const QuadratureOptions &opt = {});

double bessel_k(double nu, double t);
double log_bessel_k(double nu, double t);

/// Centered-difference residuals of the two derivative identities
///   K'_nu = -K_{nu+1} + (nu/t) K_nu   and   K'_nu = -(K_{nu+1} + K_{nu-1}) / 2.
/// Requires t > h > 0.
std::pair<double, double> bessel_k_derivative_residuals(double nu, double t, double h);

/// Temporal weight lambda(t) = (1+t)^{(mu+1)/2} K_{(mu-1)/2}(1+t).
double lambda_fn(double mu, double t);
double log_lambda(double mu, double t);

/// lambda'(t) = mu (1+t)^{(mu-1)/2} K_{(mu-1)/2}(1+t) - (1+t)^{(mu+1)/2} K_{(mu+1)/2}(1+t).
double lambda_prime(double mu, double t);

/// Radial profile of phi(x) = int_{S^{n-1}} exp(x . w) dw, i.e.
/// |S^{n-2}| int_0^pi exp(r cos th) sin^{n-2}(th) d th. Requires n >= 2, r >= 0.
double phi_radial(int n, double r);
double log_phi_radial(int n, double r, const QuadratureOptions &opt = {});

/// psi(t, r) = lambda(t) phi(r).
double psi(double mu, int n, double t, double r);
double log_psi(double mu, int n, double t, double r);

/// Bundles lambda, lambda' and phi for one (mu, n).
class TestFunction {
 public:
  TestFunction(double mu, int n);

  double mu() const { return mu_; }
  int n() const { return n_; }

  double lambda_at(double t) const { return lambda_fn(mu_, t); }
  double lambda_prime_at(double t) const { return lambda_prime(mu_, t); }
  double phi_at(double r) const { return phi_radial(n_, r); }
  double operator()(double t, double r) const { return psi(mu_, n_, t, r); }

 private:
  double mu_;
  int n_;
};

}  // namespace sdwave
