#include "sdwave/solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <type_traits>
#include <sstream>

#include <json.hpp>

#include "sdwave/error.hpp"
#include "sdwave/specfun.hpp"

namespace sdwave {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kSupportFloor = 1e-12;
constexpr double kTinyField = 1e-300;
constexpr double kSensitivityDivisor = 100.0;
constexpr double kSafeLog = 600.0;

/// |x|^p with a sqrt-and-multiply path when 2p is a small integer.
class AbsPower {
 public:
  explicit AbsPower(double p) : p_(p) {
    const double twice = 2.0 * p;
    if (twice == std::round(twice) && twice <= 16.0) {
      whole_ = static_cast<int>(twice) / 2;
      half_ = static_cast<int>(twice) % 2 == 1;
      fast_ = true;
    }
  }
  double operator()(double x) const {
    const double a = std::abs(x);
    if (a < kTinyField) return 0.0;
    if (!fast_) return std::exp(p_ * std::log(a));
    double v = half_ ? std::sqrt(a) : 1.0;
    for (int k = 0; k < whole_; ++k) v *= a;
    return v;
  }

 private:
  double p_;
  int whole_ = 0;
  bool half_ = false;
  bool fast_ = false;
};

struct Functionals {
  double G = 0.0;
  double G1 = 0.0;
  double Lp = 0.0;
  double max_abs = 0.0;
  double support = 0.0;
};

}  // namespace

std::string to_string(Form f) { return f == Form::original ? "original" : "liouville"; }

Form parse_form(const std::string &s) {
  if (s == "original") return Form::original;
  if (s == "liouville") return Form::liouville;
  throw InvalidArgument("unknown form '" + s + "' (expected original|liouville)");
}

RadialGrid RadialGrid::make(double dr, double cfl, double t_max, double support0) {
  detail::require(dr > 0.0, "RadialGrid: dr must be positive");
  detail::require(cfl > 0.0 && cfl < 1.0, "RadialGrid: cfl must lie in (0, 1)");
  RadialGrid g;
  g.dr = dr;
  g.L = t_max + support0 + 2.0 * dr;
  g.M = static_cast<int>(std::ceil(g.L / dr - 1e-9));
  g.dt = cfl * dr;
  return g;
}

SolveTrace integrate(const InitialValueProblem &ivp, const RadialGrid &grid, const EngineOptions &opt) {
  detail::require(ivp.n >= 2, "integrate: n must be >= 2");
  detail::require(grid.M >= 4, "integrate: grid too small");
  const int n = ivp.n;
  const int M = grid.M;
  const double dr = grid.dr;
  const double dt = grid.dt;
  const double dt2 = dt * dt;
  const double mu = ivp.mu;
  const double p = ivp.p;
  const bool liouville = ivp.form == Form::liouville;
  const bool forced = static_cast<bool>(ivp.forcing);
  const AbsPower power(p);

  std::vector<double> cm(M + 1, 0.0), cp(M + 1, 0.0), weight(M + 1, 0.0);
  const double inv_dr2 = 1.0 / (dr * dr);
  for (int i = 1; i <= M; ++i) {
    const double r = grid.r(i);
    cm[i] = inv_dr2 - (n - 1.0) / (2.0 * r * dr);
    cp[i] = inv_dr2 + (n - 1.0) / (2.0 * r * dr);
  }
  // trapezoid weights for |S^{n-1}| r^{n-1} dr
  const double area = sphere_area(n - 1);
  for (int i = 0; i <= M; ++i) weight[i] = area * std::pow(grid.r(i), n - 1) * dr * (i == M ? 0.5 : 1.0);

  std::vector<double> log_phi, phi;
  QuadratureOptions phi_quad;
  phi_quad.abs_tol = 0.0;
  phi_quad.rel_tol = 1e-7;
  phi_quad.min_depth = 3;
  auto ensure_phi = [&](int hi) {
    while (static_cast<int>(log_phi.size()) <= hi) {
      log_phi.push_back(log_phi_radial(n, grid.r(log_phi.size()), phi_quad));
      phi.push_back(std::exp(log_phi.back()));
    }
  };

  auto window = [&](double t) {
    const int hi = static_cast<int>(std::floor((ivp.support0 + t) / dr + 1e-9)) + 1;
    return std::clamp(hi, 2, M - 1);
  };

  // field -> u scale factor at time t
  auto u_scale = [&](double t) { return liouville ? std::pow(1.0 + t, -0.5 * mu) : 1.0; };

  SolveTrace tr;
  tr.form = ivp.form;
  tr.dr = dr;
  tr.dt = dt;
  tr.mu = mu;
  tr.g_prime0 = 0.0;

  std::vector<double> prev(M + 1, 0.0), cur(M + 1, 0.0), nxt(M + 1, 0.0);
  std::vector<double> vel(M + 1, 0.0);
  for (int i = 0; i <= M; ++i) {
    const double r = grid.r(i);
    cur[i] = ivp.u0 ? ivp.u0(r) : 0.0;
    const double ut = ivp.u1 ? ivp.u1(r) : 0.0;
    vel[i] = liouville ? 0.5 * mu * cur[i] + ut : ut;
    tr.g_prime0 += weight[i] * ut;
  }

  auto functionals = [&](const std::vector<double> &field, double t, int hi) {
    Functionals f;
    const double s = u_scale(t);
    const bool g1 = opt.compute_g1;
    double log_lam = 0.0, lam = 1.0;
    if (g1) {
      ensure_phi(hi + 1);
      log_lam = log_lambda(mu, t);
      lam = std::exp(log_lam);
    }
    for (int i = 0; i <= hi + 1 && i <= M; ++i) {
      const double u = s * field[i];
      const double a = std::abs(u);
      f.G += weight[i] * u;
      f.Lp += weight[i] * power(u);
      if (g1 && u != 0.0) {
        // the direct product is safe while both factors stay well inside range
        if (log_phi[i] < kSafeLog && log_lam > -kSafeLog) f.G1 += weight[i] * u * lam * phi[i];
        else f.G1 += weight[i] * u * std::exp(log_lam + log_phi[i]);
      }
      f.max_abs = std::max(f.max_abs, a);
      if (a > kSupportFloor) f.support = grid.r(i);
    }
    return f;
  };

  auto record = [&](const std::vector<double> &field, double t, int hi) {
    const auto f = functionals(field, t, hi);
    tr.times.push_back(t);
    tr.G.push_back(f.G);
    tr.G1.push_back(f.G1);
    tr.Lp.push_back(f.Lp);
    tr.max_abs_u.push_back(f.max_abs);
    tr.support_radius.push_back(f.support);
  };

  std::vector<double> snaps = opt.snapshot_times;
  std::sort(snaps.begin(), snaps.end());
  std::size_t next_snap = 0;
  auto maybe_snapshot = [&](const std::vector<double> &field, double t) {
    while (next_snap < snaps.size() && t >= snaps[next_snap] - 0.5 * dt) {
      tr.snapshots.push_back({t, ivp.form, field});
      ++next_snap;
    }
  };

  auto field_max = [&](const std::vector<double> &field, int hi) {
    double m = 0.0;
    for (int i = 0; i <= hi + 1 && i <= M; ++i) {
      const double a = std::abs(field[i]);
      if (!(a <= m)) m = a;  // propagates NaN
    }
    return m;
  };

  int hi = window(0.0);
  record(cur, 0.0, hi);
  maybe_snapshot(cur, 0.0);
  tr.step_times.push_back(0.0);
  tr.step_max_abs_u.push_back(field_max(cur, hi));

  // Taylor first step: u^1 = u^0 + dt v + dt^2/2 (L u^0 - damping + source)
  {
    hi = window(dt);
    const double mass0 = 0.25 * mu * (2.0 - mu);
    for (int i = 1; i <= hi; ++i) {
      const double c = cur[i];
      const double lap = cm[i] * cur[i - 1] + cp[i] * cur[i + 1] - 2.0 * inv_dr2 * c;
      double acc = lap;
      if (ivp.nonlinear) acc += power(c);
      if (forced) acc += ivp.forcing(0.0, grid.r(i));
      acc += liouville ? -mass0 * c : -mu * vel[i];
      nxt[i] = c + dt * vel[i] + 0.5 * dt2 * acc;
    }
    nxt[0] = (4.0 * nxt[1] - nxt[2]) / 3.0;
    prev.swap(cur);
    cur.swap(nxt);
  }

  const int stride = std::max(opt.output_stride, 1);
  const long long max_steps = static_cast<long long>(std::ceil(opt.t_max / dt - 1e-9));
  long long m = 1;
  tr.terminated_reason = "t_max";
  for (;; ++m) {
    const double t = m * dt;
    const double mx = u_scale(t) * field_max(cur, hi);
    tr.step_times.push_back(t);
    tr.step_max_abs_u.push_back(mx);
    const bool finished = m >= max_steps;
    const bool unstable = !std::isfinite(mx);
    const bool blown = !unstable && mx >= opt.threshold;
    if (unstable) {
      tr.terminated_reason = "instability";
      break;
    }
    if (m % stride == 0 || finished || blown) {
      record(cur, t, hi);
      maybe_snapshot(cur, t);
    }
    if (blown) {
      tr.terminated_reason = "blowup";
      break;
    }
    if (finished) break;

    hi = window(t + dt);
    const double mass = 0.25 * mu * (2.0 - mu) / ((1.0 + t) * (1.0 + t));
    const double src = liouville ? std::pow(1.0 + t, -0.5 * mu * (p - 1.0)) : 1.0;
    const double a = 0.5 * mu * dt / (1.0 + t);
    const double inv = 1.0 / (1.0 + a);
    auto kernel = [&](auto is_liouville, auto is_nonlinear, auto is_forced) {
      for (int i = 1; i <= hi; ++i) {
        const double c = cur[i];
        double acc = cm[i] * cur[i - 1] + cp[i] * cur[i + 1] - 2.0 * inv_dr2 * c;
        if constexpr (is_nonlinear) acc += src * power(c);
        if constexpr (is_forced) acc += ivp.forcing(t, grid.r(i));
        if constexpr (is_liouville) nxt[i] = 2.0 * c - prev[i] + dt2 * (acc - mass * c);
        else nxt[i] = (2.0 * c - (1.0 - a) * prev[i] + dt2 * acc) * inv;
      }
    };
    using T_ = std::true_type;
    using F_ = std::false_type;
    const int variant = (liouville ? 4 : 0) + (ivp.nonlinear ? 2 : 0) + (forced ? 1 : 0);
    switch (variant) {
      case 0: kernel(F_{}, F_{}, F_{}); break;
      case 1: kernel(F_{}, F_{}, T_{}); break;
      case 2: kernel(F_{}, T_{}, F_{}); break;
      case 3: kernel(F_{}, T_{}, T_{}); break;
      case 4: kernel(T_{}, F_{}, F_{}); break;
      case 5: kernel(T_{}, F_{}, T_{}); break;
      case 6: kernel(T_{}, T_{}, F_{}); break;
      default: kernel(T_{}, T_{}, T_{}); break;
    }
    nxt[0] = (4.0 * nxt[1] - nxt[2]) / 3.0;
    prev.swap(cur);
    cur.swap(nxt);
  }

  tr.key_residual = key_identity_residual(tr, mu);
  tr.blowup = detect_blowup(tr, opt.threshold);
  if (!tr.blowup && tr.terminated_reason == "instability") {
    BlowupRecord b;
    b.t_num = tr.step_times.back();
    b.threshold_used = opt.threshold;
    b.threshold_sensitivity = kNaN;
    b.dt_refinement_delta = kNaN;
    b.instability = true;
    tr.blowup = b;
  }
  return tr;
}

std::optional<BlowupRecord> detect_blowup(const SolveTrace &trace, double threshold) {
  detail::require(threshold >= 1e3, "detect_blowup: threshold must be >= 1e3");
  const auto &ts = trace.step_times;
  const auto &ms = trace.step_max_abs_u;
  // log-linear interpolation of the first crossing of `level`
  auto crossing = [&](double level) -> std::optional<double> {
    for (std::size_t k = 0; k < ms.size(); ++k) {
      if (!std::isfinite(ms[k])) return std::nullopt;
      if (ms[k] >= level) {
        if (k == 0 || !(ms[k - 1] > 0.0)) return ts[k];
        const double a = std::log(ms[k - 1]);
        const double b = std::log(ms[k]);
        const double frac = (std::log(level) - a) / (b - a);
        return ts[k - 1] + frac * (ts[k] - ts[k - 1]);
      }
    }
    return std::nullopt;
  };
  const auto hit = crossing(threshold);
  if (!hit) return std::nullopt;
  BlowupRecord b;
  b.t_num = *hit;
  b.threshold_used = threshold;
  const auto low = crossing(threshold / kSensitivityDivisor);
  b.threshold_sensitivity = low ? std::abs(*hit - *low) : kNaN;
  b.dt_refinement_delta = kNaN;
  return b;
}

std::vector<double> key_identity_residual(const SolveTrace &trace, double mu) {
  const auto &t = trace.times;
  const auto &G = trace.G;
  const std::size_t N = t.size();
  std::vector<double> res(N, 0.0);
  if (N < 3) return res;

  std::vector<double> dG(N);
  for (std::size_t i = 0; i < N; ++i) {
    std::size_t a, b, c;
    if (i == 0) { a = 0; b = 1; c = 2; }
    else if (i == N - 1) { a = N - 3; b = N - 2; c = N - 1; }
    else { a = i - 1; b = i; c = i + 1; }
    // derivative at t[i] of the quadratic through the three samples
    const double x = t[i];
    const double ta = t[a], tb = t[b], tc = t[c];
    const double la = ((x - tb) + (x - tc)) / ((ta - tb) * (ta - tc));
    const double lb = ((x - ta) + (x - tc)) / ((tb - ta) * (tb - tc));
    const double lc = ((x - ta) + (x - tb)) / ((tc - ta) * (tc - tb));
    dG[i] = la * G[a] + lb * G[b] + lc * G[c];
  }

  const double g0 = std::isfinite(trace.g_prime0) ? trace.g_prime0 : dG[0];
  double integral = 0.0;
  double prev_integrand = trace.Lp[0];
  for (std::size_t i = 1; i < N; ++i) {
    const double integrand = std::pow(1.0 + t[i], mu) * trace.Lp[i];
    integral += 0.5 * (t[i] - t[i - 1]) * (integrand + prev_integrand);
    prev_integrand = integrand;
    const double raw = std::pow(1.0 + t[i], mu) * dG[i] - g0 - integral;
    const double scale = std::abs(g0) + std::abs(integral);
    res[i] = scale > 0.0 ? raw / scale : (raw == 0.0 ? 0.0 : raw);
  }
  return res;
}

SolveTrace solve(const ProblemSpec &spec, double eps, Form form, const SolveOptions &opt) {
  spec.validate();
  detail::require(eps > 0.0, "solve: eps must be positive");
  InitialValueProblem ivp;
  ivp.n = spec.n;
  ivp.mu = spec.mu;
  ivp.p = spec.p;
  ivp.form = form;
  ivp.support0 = spec.R;
  const BumpProfile f = spec.f, g = spec.g;
  const double R = spec.R;
  ivp.u0 = [=](double r) { return eps * f(r, R); };
  ivp.u1 = [=](double r) { return eps * g(r, R); };

  EngineOptions eo;
  eo.t_max = spec.grid.t_max;
  eo.output_stride = spec.grid.output_stride;
  eo.threshold = spec.blowup_threshold;
  eo.snapshot_times = opt.snapshot_times;
  eo.compute_g1 = opt.compute_g1;

  const auto grid = RadialGrid::make(spec.grid.dr, spec.grid.cfl, spec.grid.t_max, spec.R);
  SolveTrace tr = integrate(ivp, grid, eo);
  tr.eps = eps;

  if (opt.refine_dt && tr.blowup && !tr.blowup->instability) {
    ProblemSpec fine = spec;
    fine.grid.cfl = 0.5 * spec.grid.cfl;
    // the refined run only needs to reach slightly past the coarse crossing
    fine.grid.t_max = std::min(spec.grid.t_max, 1.5 * tr.blowup->t_num + 1.0);
    fine.grid.output_stride = std::max(1, 2 * spec.grid.output_stride);
    SolveOptions fo;
    fo.compute_g1 = false;
    auto ivp_fine = ivp;
    EngineOptions efo = eo;
    efo.t_max = fine.grid.t_max;
    efo.output_stride = fine.grid.output_stride;
    efo.snapshot_times.clear();
    efo.compute_g1 = false;
    const auto fine_grid = RadialGrid::make(spec.grid.dr, fine.grid.cfl, fine.grid.t_max, spec.R);
    const auto ft = integrate(ivp_fine, fine_grid, efo);
    if (ft.blowup && !ft.blowup->instability)
      tr.blowup->dt_refinement_delta = std::abs(tr.blowup->t_num - ft.blowup->t_num);
  }
  return tr;
}

LowerBoundReport verify_lower_bounds(const SolveTrace &trace, const Certificate &cert, double eps,
                                     std::optional<double> t_upper) {
  LowerBoundReport rep;
  const auto &s = cert.spec;
  if (!(s.f.amplitude > 0.0 || s.g.amplitude > 0.0) || !(cert.c_fg > 0.0)) {
    rep.skipped = true;
    rep.reason = "initial data vanish identically";
    return rep;
  }
  if (!(eps > 0.0)) {
    rep.skipped = true;
    rep.reason = "eps must be positive";
    return rep;
  }
  const double up = t_upper.value_or(trace.times.empty() ? 0.0 : trace.times.back());
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < trace.times.size(); ++i)
    if (trace.times[i] > cert.t0 && trace.times[i] <= up) idx.push_back(i);
  if (idx.empty()) {
    rep.skipped = true;
    rep.reason = "no recorded times in (T0, t_upper]";
    return rep;
  }
  const int n = s.n;
  const double mu = s.mu;
  const double p = s.p;
  const double nu = 0.5 * (mu - 1.0);

  std::vector<double> ts;
  ts.reserve(idx.size());
  for (auto i : idx) ts.push_back(trace.times[i]);
  QuadratureOptions kq;
  kq.rel_tol = 1e-8;
  kq.min_depth = 1;
  const auto log_kernel = log_inverse_weight_integral(mu, ts, kq);

  rep.margin_lp = rep.margin_g = rep.margin_g1 = std::numeric_limits<double>::infinity();
  const double log_eps = std::log(eps);
  for (std::size_t k = 0; k < idx.size(); ++k) {
    const std::size_t i = idx[k];
    const double t = ts[k];
    const double l1t = std::log1p(t);
    const double log_rhs_lp =
        std::log(cert.c1) + p * log_eps + (n - 1.0 - 0.5 * (n + mu - 1.0) * p) * l1t;
    const double log_rhs_g = std::log(cert.c2) + p * log_eps +
                             (-mu - 0.5 * (n + mu - 1.0) * p) * l1t +
                             (n + mu + 1.0) * std::log(t - cert.t0);
    const double log_rhs_g1 = log_eps + std::log(cert.c_fg) + l1t +
                              2.0 * log_bessel_k(nu, 1.0 + t) + log_kernel[k];
    rep.margin_lp = std::min(rep.margin_lp, trace.Lp[i] / std::exp(log_rhs_lp));
    rep.margin_g = std::min(rep.margin_g, trace.G[i] / std::exp(log_rhs_g));
    rep.margin_g1 = std::min(rep.margin_g1, trace.G1[i] / std::exp(log_rhs_g1));
  }
  rep.checked_points = static_cast<int>(idx.size());
  rep.t_from = ts.front();
  rep.t_to = ts.back();
  return rep;
}

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12e", x);
  return buf;
}

double parse_num(const std::string &s) {
  if (s == "nan") return kNaN;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw ConfigError("trace CSV: bad number '" + s + "'");
  return v;
}

}  // namespace

std::string trace_to_csv(const SolveTrace &tr, const std::string &header_comment) {
  std::ostringstream os;
  std::istringstream hc(header_comment);
  for (std::string line; std::getline(hc, line);) os << "# " << line << '\n';
  os << "# eps = " << format_double(tr.eps) << '\n'
     << "# form = " << to_string(tr.form) << '\n'
     << "# dt = " << format_double(tr.dt) << '\n'
     << "# g_prime0 = " << num(tr.g_prime0) << '\n';
  os << "t,G,G1,Lp,max_abs_u,key_residual,support_radius\n";
  for (std::size_t i = 0; i < tr.times.size(); ++i) {
    os << num(tr.times[i]) << ',' << num(tr.G[i]) << ',' << num(tr.G1[i]) << ',' << num(tr.Lp[i])
       << ',' << num(tr.max_abs_u[i]) << ',' << num(tr.key_residual[i]) << ','
       << num(tr.support_radius[i]) << '\n';
  }
  return os.str();
}

SolveTrace trace_from_csv(const std::string &text) {
  SolveTrace tr;
  std::istringstream in(text);
  std::string line;
  bool header_seen = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      auto key = line.substr(1, eq - 1);
      auto val = line.substr(eq + 1);
      key.erase(0, key.find_first_not_of(' '));
      key.erase(key.find_last_not_of(' ') + 1);
      val.erase(0, val.find_first_not_of(' '));
      if (key == "eps") tr.eps = parse_num(val);
      else if (key == "form") tr.form = parse_form(val);
      else if (key == "dt") tr.dt = parse_num(val);
      else if (key == "dr") tr.dr = parse_num(val);
      else if (key == "mu") tr.mu = parse_num(val);
      else if (key == "g_prime0") tr.g_prime0 = parse_num(val);
      continue;
    }
    if (!header_seen) {
      if (line != "t,G,G1,Lp,max_abs_u,key_residual,support_radius")
        throw ConfigError("trace CSV: unexpected header '" + line + "'");
      header_seen = true;
      continue;
    }
    std::vector<double> v;
    std::istringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) v.push_back(parse_num(cell));
    if (v.size() != 7) throw ConfigError("trace CSV: expected 7 columns");
    tr.times.push_back(v[0]);
    tr.G.push_back(v[1]);
    tr.G1.push_back(v[2]);
    tr.Lp.push_back(v[3]);
    tr.max_abs_u.push_back(v[4]);
    tr.key_residual.push_back(v[5]);
    tr.support_radius.push_back(v[6]);
  }
  if (!header_seen) throw ConfigError("trace CSV: missing header");
  return tr;
}

std::string trace_meta_json(const SolveTrace &tr) {
  nlohmann::ordered_json j;
  auto val = [](double x) -> nlohmann::ordered_json {
    if (std::isfinite(x)) return x;
    return nullptr;
  };
  if (tr.blowup) {
    j["t_num"] = val(tr.blowup->t_num);
    j["threshold"] = tr.blowup->threshold_used;
    j["threshold_sensitivity"] = val(tr.blowup->threshold_sensitivity);
    j["dt_refinement_delta"] = val(tr.blowup->dt_refinement_delta);
    j["instability"] = tr.blowup->instability;
  } else {
    j["t_num"] = nullptr;
    j["threshold"] = nullptr;
    j["threshold_sensitivity"] = nullptr;
    j["dt_refinement_delta"] = nullptr;
    j["instability"] = false;
  }
  j["terminated_reason"] = tr.terminated_reason;
  return j.dump(2) + "\n";
}

}  // namespace sdwave
