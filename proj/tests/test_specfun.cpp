#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "sdwave/error.hpp"
#include "sdwave/specfun.hpp"

using namespace sdwave;
using std::numbers::pi;

namespace {

double k_half(double t) { return std::sqrt(pi / (2.0 * t)) * std::exp(-t); }

// composite trapezoid of the defining integral on a fixed fine grid
double k_brute(double nu, double t) {
  const double Z = 12.0;
  const int N = 200000;
  const double h = Z / N;
  double s = 0.5 * std::exp(-t);
  for (int i = 1; i < N; ++i) {
    const double z = i * h;
    s += std::exp(-t * std::cosh(z)) * std::cosh(nu * z);
  }
  return s * h;
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST_CASE("K_{1/2} against the closed form and brute-force quadrature") {
  CHECK(rel(bessel_k(0.5, 1.0), std::sqrt(pi / 2.0) * std::exp(-1.0)) < 1e-10);
  CHECK(bessel_k(0.5, 1.0) == doctest::Approx(0.4610685).epsilon(1e-7));
  for (double t = 0.5; t <= 50.0; t *= 1.3) CHECK(rel(bessel_k(0.5, t), k_half(t)) < 1e-9);
  for (double t : {0.7, 2.0, 6.0}) {
    CHECK(rel(bessel_k(0.5, t), k_brute(0.5, t)) < 1e-8);
    CHECK(rel(bessel_k(1.3, t), k_brute(1.3, t)) < 1e-8);
  }
}

TEST_CASE("K_nu symmetry, positivity and errors") {
  CHECK(rel(bessel_k(0.7, 2.3), bessel_k(-0.7, 2.3)) < 1e-10);
  for (double nu : {0.0, 0.25, 1.5, 3.0})
    for (double t : {0.1, 1.0, 10.0, 100.0}) CHECK(bessel_k(nu, t) > 0.0);
  CHECK_THROWS_AS(bessel_k(0.5, 0.0), InvalidArgument);
  CHECK_THROWS_AS(bessel_k(0.5, -1.0), InvalidArgument);
}

TEST_CASE("log-domain K_nu at large arguments") {
  for (double t : {800.0, 2000.0, 1e4}) {
    const double exact = 0.5 * std::log(pi / (2.0 * t)) - t;
    CHECK(std::abs(log_bessel_k(0.5, t) - exact) < 1e-9 * std::abs(exact));
    CHECK(std::isfinite(log_bessel_k(2.5, t)));
  }
  const auto e = bessel_k_eval(1.5, 3.0);
  CHECK_FALSE(e.accuracy_warning);
  CHECK(e.rel_err_estimate < 1e-9);
}

TEST_CASE("K_nu large-t normalization") {
  CHECK(std::abs(bessel_k(1.5, 50.0) * std::sqrt(100.0 / pi) * std::exp(50.0) - 1.0) < 0.05);
  // K_{3/2}(t) = sqrt(pi/(2t)) e^{-t} (1 + 1/t)
  for (double t : {1.0, 5.0, 30.0}) CHECK(rel(bessel_k(1.5, t), k_half(t) * (1.0 + 1.0 / t)) < 1e-9);
}

TEST_CASE("derivative identities are second order in h") {
  for (auto [nu, t] : {std::pair{0.5, 2.0}, std::pair{1.5, 5.0}}) {
    const auto [r1, r2] = bessel_k_derivative_residuals(nu, t, 1e-4);
    CHECK(r1 < 1e-6);
    CHECK(r2 < 1e-6);
  }
  const auto a = bessel_k_derivative_residuals(1.2, 1.5, 0.04);
  const auto b = bessel_k_derivative_residuals(1.2, 1.5, 0.02);
  CHECK(a.first / b.first == doctest::Approx(4.0).epsilon(0.05));
  CHECK(a.second / b.second == doctest::Approx(4.0).epsilon(0.05));
}

TEST_CASE("lambda: closed form for mu = 2 and the initial identity") {
  for (double t : {0.0, 1.0, 5.0})
    CHECK(rel(lambda_fn(2.0, t), std::sqrt(pi / 2.0) * (1.0 + t) * std::exp(-(1.0 + t))) < 1e-9);
  for (double mu : {0.5, 1.0, 2.0, 3.0}) {
    CHECK(rel(lambda_fn(mu, 0.0), bessel_k(0.5 * (mu - 1.0), 1.0)) < 1e-10);
    const double lhs = mu * lambda_fn(mu, 0.0) - lambda_prime(mu, 0.0);
    CHECK(lhs > 0.0);
    CHECK(rel(lhs, bessel_k(0.5 * (mu + 1.0), 1.0)) < 1e-9);
  }
  // log-domain decay
  CHECK(log_lambda(2.0, 100.0) - log_lambda(2.0, 0.0) < std::log(1e-20) + 60.0);
  CHECK(log_lambda(2.0, 100.0) < -90.0);
}

TEST_CASE("lambda solves its ODE") {
  const double h = 1e-4;
  for (double mu : {0.5, 2.0, 3.0})
    for (double t : {0.5, 2.0, 10.0}) {
      const double l = lambda_fn(mu, t);
      const double lp = lambda_prime(mu, t);
      const double lpp = (lambda_prime(mu, t + h) - lambda_prime(mu, t - h)) / (2.0 * h);
      const double res = (1.0 + t) * (1.0 + t) * lpp - mu * (1.0 + t) * lp + (mu - (1.0 + t) * (1.0 + t)) * l;
      CHECK(std::abs(res) < 1e-6 * std::abs(l));
      // identity against differencing lambda itself
      const double fd = (lambda_fn(mu, t + h) - lambda_fn(mu, t - h)) / (2.0 * h);
      CHECK(std::abs(fd - lp) < 1e-6 * std::abs(lp));
    }
}

TEST_CASE("phi: values, closed form for n = 3 and positivity") {
  CHECK(phi_radial(3, 0.0) == doctest::Approx(4.0 * pi).epsilon(1e-12));
  for (int n = 2; n <= 6; ++n) CHECK(rel(phi_radial(n, 0.0), sphere_area(n - 1)) < 1e-10);
  for (double r : {0.5, 2.0, 10.0, 60.0}) CHECK(rel(phi_radial(3, r), 4.0 * pi * std::sinh(r) / r) < 1e-9);
  CHECK(std::abs(log_phi_radial(3, 500.0) - (std::log(2.0 * pi / 500.0) + 500.0)) < 1e-9 * 500.0);
  double prev = 0.0;
  for (double r = 0.0; r < 30.0; r += 0.37) {
    const double v = phi_radial(4, r);
    CHECK(v > prev);
    prev = v;
  }
  CHECK_THROWS_AS(phi_radial(1, 1.0), InvalidArgument);
  CHECK_THROWS_AS(phi_radial(3, -1.0), InvalidArgument);
}

TEST_CASE("phi is an eigenfunction of the radial Laplacian") {
  auto residual = [](int n, double r, double h) {
    const double c = phi_radial(n, r);
    const double d2 = (phi_radial(n, r + h) - 2.0 * c + phi_radial(n, r - h)) / (h * h);
    const double d1 = (phi_radial(n, r + h) - phi_radial(n, r - h)) / (2.0 * h);
    return std::abs(d2 + (n - 1.0) / r * d1 - c) / c;
  };
  CHECK(residual(4, 3.0, 1e-3) < 1e-5);
  const double a = residual(4, 3.0, 0.08), b = residual(4, 3.0, 0.04);
  CHECK(a / b == doctest::Approx(4.0).epsilon(0.1));
}

TEST_CASE("phi asymptotics settle") {
  auto scaled = [](int n, double r) { return std::exp(0.5 * (n - 1.0) * std::log(r) - r + log_phi_radial(n, r)); };
  CHECK(std::abs(scaled(3, 80.0) / scaled(3, 40.0) - 1.0) < 1e-3);
  // the next term is O((n-1)(n-3)/(8r)), so other n need larger radii
  for (int n : {2, 4, 5}) CHECK(std::abs(scaled(n, 4000.0) / scaled(n, 2000.0) - 1.0) < 1e-3);
}

TEST_CASE("psi composes lambda and phi") {
  CHECK(rel(psi(2.0, 3, 0.0, 0.0), bessel_k(0.5, 1.0) * 4.0 * pi) < 1e-10);
  for (double t : {0.5, 3.0, 20.0})
    CHECK(rel(psi(2.0, 3, t, 0.0) / psi(2.0, 3, 0.0, 0.0), lambda_fn(2.0, t) / lambda_fn(2.0, 0.0)) < 1e-12);
  const TestFunction tf(1.5, 4);
  for (double t : {0.0, 1.0, 40.0})
    for (double r : {0.0, 2.0, 50.0}) CHECK(tf(t, r) > 0.0);
  CHECK(tf.lambda_at(1.0) == doctest::Approx(lambda_fn(1.5, 1.0)));
}

TEST_CASE("asymptotic error of K_nu decays like 1/t") {
  std::vector<double> lt, le;
  for (double t = 20.0; t <= 80.0; t += 5.0) {
    const double e = std::abs(std::exp(log_bessel_k(2.5, t) + t) * std::sqrt(2.0 * t / pi) - 1.0);
    lt.push_back(std::log(t));
    le.push_back(std::log(e));
  }
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < lt.size(); ++i) { mx += lt[i]; my += le[i]; }
  mx /= lt.size();
  my /= lt.size();
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < lt.size(); ++i) {
    sxx += (lt[i] - mx) * (lt[i] - mx);
    sxy += (lt[i] - mx) * (le[i] - my);
  }
  CHECK(sxy / sxx == doctest::Approx(-1.0).epsilon(0.2));
}

TEST_CASE("sphere and ball measures") {
  CHECK(sphere_area(1) == doctest::Approx(2.0 * pi));
  CHECK(sphere_area(2) == doctest::Approx(4.0 * pi));
  CHECK(ball_volume(3) == doctest::Approx(4.0 * pi / 3.0));
  CHECK(ball_volume(2) == doctest::Approx(pi));
}
