#include "sdwave/certificate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include <json.hpp>

#include "sdwave/error.hpp"
#include "sdwave/exponents.hpp"
#include "sdwave/specfun.hpp"

namespace sdwave {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

constexpr double kT0ScanStart = 2.5;
constexpr double kT0ScanStep = 0.5;
constexpr double kT0ScanEnd = 100.0;
constexpr double kT0AsymptoticTol = 0.1;

double asymptotic_ratio(double nu, double t) {
  return std::exp(log_bessel_k(nu, t) + 0.5 * std::log(2.0 * t / kPi) + t);
}

}  // namespace

std::vector<double> log_inverse_weight_integral(double mu, const std::vector<double> &times,
                                                const QuadratureOptions &opt) {
  const double nu = 0.5 * (mu - 1.0);
  auto log_integrand = [nu](double s) { return -std::log1p(s) - 2.0 * log_bessel_k(nu, 1.0 + s); };
  QuadratureOptions piece = opt;
  piece.min_depth = std::min(piece.min_depth, 2);
  piece.abs_tol = 0.0;

  std::vector<double> out;
  out.reserve(times.size());
  double acc = kNegInf;
  double left = 0.0;
  for (double t : times) {
    if (t < left) throw InvalidArgument("log_inverse_weight_integral: times must be increasing");
    if (t > left) {
      // the integrand grows like e^{2s}; shift by its right-end value
      const double shift = log_integrand(t);
      auto q = adaptive_simpson([&](double s) { return std::exp(log_integrand(s) - shift); }, left,
                                t, piece);
      acc = log_add_exp(acc, shift + std::log(q.value));
    }
    out.push_back(acc);
    left = t;
  }
  return out;
}

double compute_T0(double mu) {
  detail::require(mu > 0.0, "compute_T0: mu must be positive");
  std::vector<double> ts;
  for (double t = kT0ScanStart; t <= kT0ScanEnd + 1e-12; t += kT0ScanStep) ts.push_back(t);

  // The kernel bound must hold for every admissible p, and p < p_S(n+mu) <= p_S(2+mu).
  const double p_cap = strauss_exponent(2.0 + mu);
  const double kernel_floor = std::pow(2.0, -1.0 / p_cap);
  const auto log_kernel = log_inverse_weight_integral(mu, ts);

  std::vector<bool> ok(ts.size());
  for (std::size_t i = 0; i < ts.size(); ++i) {
    const double s = 1.0 + ts[i];
    const bool lo = std::abs(asymptotic_ratio(0.5 * (mu - 1.0), s) - 1.0) <= kT0AsymptoticTol;
    const bool hi = std::abs(asymptotic_ratio(0.5 * (mu + 1.0), s) - 1.0) <= kT0AsymptoticTol;
    const double normalized = kPi * std::exp(log_kernel[i] - 2.0 * s);
    ok[i] = lo && hi && normalized >= kernel_floor;
  }
  if (!ok.back()) throw ComputationError("compute_T0: no admissible T0 <= 100 for mu = " + format_double(mu));
  std::size_t first = ts.size() - 1;
  while (first > 0 && ok[first - 1]) --first;
  return ts[first];
}

double compute_c_fg(const ProblemSpec &spec, const QuadratureOptions &opt) {
  const double lambda0 = lambda_fn(spec.mu, 0.0);
  const double kplus = bessel_k(0.5 * (spec.mu + 1.0), 1.0);
  auto integrand = [&](double r) {
    if (r == 0.0) return 0.0;
    const double data = spec.g(r, spec.R) * lambda0 + kplus * spec.f(r, spec.R);
    return data * phi_radial(spec.n, r) * std::pow(r, spec.n - 1);
  };
  const auto q = adaptive_simpson(integrand, 0.0, spec.R, opt);
  return sphere_area(spec.n - 1) * q.value;
}

double compute_c_phi(const ProblemSpec &spec, const CertificateOptions &opt) {
  const int n = spec.n;
  const double pp = spec.p / (spec.p - 1.0);
  const double expo = (n - 1.0) - (n - 1.0) * pp / 2.0;

  std::vector<double> ts{0.0};
  const double la = std::log(opt.phi_grid_tmin);
  const double lb = std::log(opt.phi_grid_tmax);
  for (int k = 0; k < opt.phi_grid_points; ++k)
    ts.push_back(std::exp(la + (lb - la) * k / (opt.phi_grid_points - 1)));

  auto log_integrand = [&](double r) {
    if (r == 0.0) return kNegInf;
    return pp * log_phi_radial(n, r) + (n - 1.0) * std::log(r);
  };

  QuadratureOptions piece = opt.quad;
  piece.abs_tol = 0.0;
  double acc = kNegInf;
  double left = 0.0;
  double best = kNegInf;
  const double log_area = std::log(sphere_area(n - 1));
  for (double t : ts) {
    const double rho = spec.R + t;
    if (rho > left) {
      const double shift = log_integrand(rho);
      auto q = adaptive_simpson([&](double r) { return std::exp(log_integrand(r) - shift); }, left,
                                rho, piece);
      acc = log_add_exp(acc, shift + std::log(q.value));
      left = rho;
    }
    const double log_ratio = log_area + acc - expo * std::log(rho) - pp * rho;
    best = std::max(best, log_ratio);
  }
  return std::exp(best);
}

Certificate exponent_constants(const ProblemSpec &spec) {
  spec.validate();
  Certificate c;
  c.spec = spec;
  const int n = spec.n;
  const double mu = spec.mu;
  const double p = spec.p;
  c.gamma = gamma(p, n + mu);
  c.lifespan_exponent = 2.0 * p * (p - 1.0) / c.gamma;
  c.c0 = std::pow(ball_volume(n), 1.0 - p) * std::pow(spec.R, -n * (p - 1.0));
  c.alpha = mu + (n + mu - 1.0) * p / 2.0 + n + mu / (p - 1.0);
  c.beta = n + mu + 1.0 + (mu + 2.0) / (p - 1.0);
  c.c3 = c.c0 / (c.beta * c.beta);
  c.s_p_inf = 2.0 * p * std::log(p) / ((p - 1.0) * (p - 1.0)) - p * std::log(c.c3) / (p - 1.0);
  return c;
}

Certificate compute_constants(const ProblemSpec &spec, const CertificateOptions &opt) {
  spec.validate();
  if (!(spec.f.amplitude > 0.0 || spec.g.amplitude > 0.0))
    throw ConfigError("initial data vanish identically");

  Certificate c = exponent_constants(spec);
  c.options = opt;
  const int n = spec.n;
  const double mu = spec.mu;
  const double p = spec.p;
  const double R = spec.R;

  c.c_fg = compute_c_fg(spec, opt.quad);
  if (!(c.c_fg > 0.0)) throw ConfigError("C_fg is not positive");
  c.c_phi = compute_c_phi(spec, opt);
  const double r_expo = (n - 1.0) - (n - 1.0) * p / (2.0 * (p - 1.0));
  c.c_phi_r = std::max(c.c_phi * std::pow(R, r_expo), c.c_phi);
  c.c1 = 0.5 * std::pow(c.c_fg, p) * std::pow(c.c_phi_r, 1.0 - p) * std::exp(p * (1.0 - R)) *
         std::pow(kPi, -p);
  c.c2 = c.c1 / ((n + mu) * (n + mu + 1.0));
  c.c4 = std::exp((c.s_p_inf + c.alpha * std::log(2.0) + 1.0 - std::log(c.c2)) * 2.0 * (p - 1.0) /
                  c.gamma);
  c.t0 = compute_T0(mu);
  return c;
}

double Certificate::threshold(double eps) const {
  const double p = spec.p;
  const double log_inner = s_p_inf + alpha * std::log(2.0) + 1.0 - std::log(c2) - p * std::log(eps);
  const double power_branch = t0 + std::exp(log_inner * 2.0 * (p - 1.0) / gamma);
  return std::max(power_branch, 2.0 * t0 + 1.0);
}

int Certificate::validity_index() const {
  const double p = spec.p;
  return static_cast<int>(std::floor(p * std::log(c3) / (2.0 * std::log(p)) - 1.0 / (p - 1.0))) + 1;
}

double Certificate::J(double eps, double t) const {
  detail::require(t > t0, "J: requires t > T0");
  const double log_d1 = std::log(c2) + spec.p * std::log(eps);
  return log_d1 - s_p_inf - alpha * std::log1p(t) + beta * std::log(t - t0);
}

double Certificate::eps0() const {
  const double floor_branch = 2.0 * t0 + 1.0;
  // T0 + C4 eps^{-k} >= 10 (2T0 + 1)
  const double need = 10.0 * floor_branch - t0;
  return std::pow(c4 / need, 1.0 / lifespan_exponent);
}

std::vector<IterationState> iterate_sequences(const Certificate &cert, double eps, int j_max) {
  detail::require(j_max >= 1, "iterate_sequences: j_max must be >= 1");
  detail::require(eps > 0.0, "iterate_sequences: eps must be positive");
  const auto &s = cert.spec;
  const double p = s.p;
  std::vector<IterationState> out;
  out.reserve(j_max);
  IterationState st;
  st.j = 1;
  st.log_D = std::log(cert.c2) + p * std::log(eps);
  st.a = s.mu + (s.n + s.mu - 1.0) * p / 2.0;
  st.b = s.n + s.mu + 1.0;
  out.push_back(st);
  const double log_c0 = std::log(cert.c0);
  for (int j = 2; j <= j_max; ++j) {
    IterationState nx;
    nx.j = j;
    nx.log_D = p * st.log_D + log_c0 - 2.0 * std::log(s.mu + p * st.b + 2.0);
    nx.a = s.mu + s.n * (p - 1.0) + p * st.a;
    nx.b = s.mu + 2.0 + p * st.b;
    out.push_back(nx);
    st = nx;
  }
  return out;
}

double a_closed_form(const Certificate &cert, int j) {
  const auto &s = cert.spec;
  return cert.alpha * std::pow(s.p, j - 1) - (s.n + s.mu / (s.p - 1.0));
}

double b_closed_form(const Certificate &cert, int j) {
  const auto &s = cert.spec;
  return cert.beta * std::pow(s.p, j - 1) - (s.mu + 2.0) / (s.p - 1.0);
}

double weighted_power_sum(double p, int j) {
  return ((std::pow(p, j) - 1.0) / (p - 1.0) - j) / (p - 1.0);
}

double geometric_power_sum(double p, int j) { return (p - std::pow(p, j)) / (1.0 - p); }

DjBound log_Dj_lower_bound(const Certificate &cert, double eps, int j) {
  detail::require(j >= 1, "log_Dj_lower_bound: j must be >= 1");
  const double p = cert.spec.p;
  const double log_d1 = std::log(cert.c2) + p * std::log(eps);
  DjBound b;
  b.validity_index = cert.validity_index();
  b.index_too_small = !(j > b.validity_index);
  b.log_bound = std::pow(p, j - 1) * (log_d1 - cert.s_p_inf);
  return b;
}

LifespanBound lifespan_bound(const Certificate &cert, double eps) {
  detail::require(eps > 0.0, "lifespan_bound: eps must be positive");
  LifespanBound out;
  out.t_bound = cert.threshold(eps);
  out.t_asymptotic = cert.c4 * std::pow(eps, -cert.lifespan_exponent);
  out.eps0 = cert.eps0();
  return out;
}

namespace {

nlohmann::json problem_json(const ProblemSpec &s) {
  return {{"n", s.n},
          {"mu", s.mu},
          {"p", s.p},
          {"R", s.R},
          {"f_amplitude", s.f.amplitude},
          {"f_k", s.f.k},
          {"g_amplitude", s.g.amplitude},
          {"g_k", s.g.k},
          {"dr", s.grid.dr},
          {"cfl", s.grid.cfl},
          {"t_max", s.grid.t_max},
          {"output_stride", s.grid.output_stride},
          {"blowup_threshold", s.blowup_threshold}};
}

ProblemSpec problem_from(const nlohmann::json &j) {
  ProblemSpec s;
  s.n = j.at("n").get<int>();
  s.mu = j.at("mu").get<double>();
  s.p = j.at("p").get<double>();
  s.R = j.at("R").get<double>();
  s.f.amplitude = j.at("f_amplitude").get<double>();
  s.f.k = j.at("f_k").get<int>();
  s.g.amplitude = j.at("g_amplitude").get<double>();
  s.g.k = j.at("g_k").get<int>();
  s.grid.dr = j.at("dr").get<double>();
  s.grid.cfl = j.at("cfl").get<double>();
  s.grid.t_max = j.at("t_max").get<double>();
  s.grid.output_stride = j.at("output_stride").get<int>();
  s.blowup_threshold = j.at("blowup_threshold").get<double>();
  return s;
}

}  // namespace

std::string certificate_to_json(const Certificate &c) {
  nlohmann::ordered_json j;
  j["c0"] = c.c0;
  j["c_fg"] = c.c_fg;
  j["c_phi"] = c.c_phi;
  j["c_phi_r"] = c.c_phi_r;
  j["c1"] = c.c1;
  j["c2"] = c.c2;
  j["c3"] = c.c3;
  j["c4"] = c.c4;
  j["alpha"] = c.alpha;
  j["beta"] = c.beta;
  j["s_p_inf"] = c.s_p_inf;
  j["t0"] = c.t0;
  j["gamma"] = c.gamma;
  j["lifespan_exponent"] = c.lifespan_exponent;
  j["validity_index"] = c.validity_index();
  j["eps0"] = c.eps0();
  j["spec"] = problem_json(c.spec);
  j["tolerances"] = {{"quad_abs_tol", c.options.quad.abs_tol},
                     {"quad_rel_tol", c.options.quad.rel_tol},
                     {"quad_max_depth", c.options.quad.max_depth},
                     {"quad_min_depth", c.options.quad.min_depth},
                     {"t0_asymptotic_tol", kT0AsymptoticTol}};
  j["resolutions"] = {{"phi_grid_points", c.options.phi_grid_points},
                      {"phi_grid_tmin", c.options.phi_grid_tmin},
                      {"phi_grid_tmax", c.options.phi_grid_tmax},
                      {"t0_scan", {kT0ScanStart, kT0ScanStep, kT0ScanEnd}}};
  return j.dump(2) + "\n";
}

Certificate certificate_from_json(const std::string &text) {
  Certificate c;
  try {
    const auto j = nlohmann::json::parse(text);
    c.c0 = j.at("c0").get<double>();
    c.c_fg = j.at("c_fg").get<double>();
    c.c_phi = j.value("c_phi", 0.0);
    c.c_phi_r = j.at("c_phi_r").get<double>();
    c.c1 = j.at("c1").get<double>();
    c.c2 = j.at("c2").get<double>();
    c.c3 = j.at("c3").get<double>();
    c.c4 = j.at("c4").get<double>();
    c.alpha = j.at("alpha").get<double>();
    c.beta = j.at("beta").get<double>();
    c.s_p_inf = j.at("s_p_inf").get<double>();
    c.t0 = j.at("t0").get<double>();
    c.gamma = j.at("gamma").get<double>();
    c.lifespan_exponent = j.at("lifespan_exponent").get<double>();
    c.spec = problem_from(j.at("spec"));
    if (j.contains("tolerances")) {
      const auto &t = j["tolerances"];
      c.options.quad.abs_tol = t.value("quad_abs_tol", c.options.quad.abs_tol);
      c.options.quad.rel_tol = t.value("quad_rel_tol", c.options.quad.rel_tol);
      c.options.quad.max_depth = t.value("quad_max_depth", c.options.quad.max_depth);
      c.options.quad.min_depth = t.value("quad_min_depth", c.options.quad.min_depth);
    }
  } catch (const nlohmann::json::exception &e) {
    throw ConfigError(std::string("malformed certificate JSON: ") + e.what());
  }
  return c;
}

}  // namespace sdwave
