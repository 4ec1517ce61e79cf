#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace sdwave {

struct QuadratureOptions {
  double abs_tol = 1e-12;
  double rel_tol = 1e-10;
  int max_depth = 40;
  /// Uniform subdivision forced before any panel may be accepted.
  int min_depth = 4;
};

struct QuadratureResult {
  double value = 0.0;
  double error = 0.0;  ///< Sum of local |S2 - S1| / 15 estimates.
  bool converged = true;
  int evaluations = 0;
};

namespace detail {

template <class F>
struct SimpsonState {
  F &f;
  double tol;
  int max_depth;
  int min_depth;
  QuadratureResult result;
};

template <class F>
void simpson_panel(SimpsonState<F> &st, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = st.f(lm);
  const double frm = st.f(rm);
  st.result.evaluations += 2;
  const double h = b - a;
  const double left = h / 12.0 * (fa + 4.0 * flm + fm);
  const double right = h / 12.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth >= st.min_depth && std::abs(delta) <= 15.0 * tol) {
    st.result.value += left + right + delta / 15.0;
    st.result.error += std::abs(delta) / 15.0;
    return;
  }
  if (depth >= st.max_depth) {
    st.result.value += left + right + delta / 15.0;
    st.result.error += std::abs(delta) / 15.0;
    st.result.converged = false;
    return;
  }
  simpson_panel(st, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1);
  simpson_panel(st, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace detail

/// Adaptive Simpson quadrature with Richardson correction.
///
/// The global tolerance is max(abs_tol, rel_tol * |I0|), where I0 is a
/// composite Simpson estimate on 2^min_depth panels. Hitting max_depth on
/// any panel clears `converged` (the accuracy-warning condition).
template <class F>
QuadratureResult adaptive_simpson(F &&f, double a, double b, const QuadratureOptions &opt = {}) {
  QuadratureResult out;
  if (!(b > a)) return out;
  const int panels = 1 << std::max(opt.min_depth, 1);
  const double h = (b - a) / panels;
  std::vector<double> fx(2 * panels + 1);
  for (int i = 0; i <= 2 * panels; ++i) fx[i] = f(a + 0.5 * h * i);
  double coarse = 0.0;
  for (int k = 0; k < panels; ++k) coarse += h / 6.0 * (fx[2 * k] + 4.0 * fx[2 * k + 1] + fx[2 * k + 2]);

  const double tol = std::max(opt.abs_tol, opt.rel_tol * std::abs(coarse));
  detail::SimpsonState<F> st{f, tol, opt.max_depth, 0, {}};
  st.result.evaluations = 2 * panels + 1;
  for (int k = 0; k < panels; ++k) {
    const double pa = a + h * k;
    const double pb = pa + h;
    const double whole = h / 6.0 * (fx[2 * k] + 4.0 * fx[2 * k + 1] + fx[2 * k + 2]);
    detail::simpson_panel(st, pa, pb, fx[2 * k], fx[2 * k + 1], fx[2 * k + 2], whole, tol / panels,
                          opt.min_depth);
  }
  return st.result;
}

/// log(exp(a) + exp(b)) without overflow; -inf is the identity.
inline double log_add_exp(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(std::min(a, b) - hi));
}

}  // namespace sdwave
