#include "sdwave/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

#include "sdwave/error.hpp"

namespace sdwave {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kSensitivityFraction = 0.05;
constexpr double kMonotoneSlack = 0.05;
constexpr const char *kSweepHeader =
    "eps,t_num,threshold_sensitivity,dt_delta,bound_threshold,bound_ok,c4_bound,c4_ok,status";

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return format_double(x);
}

double parse_num(const std::string &s) {
  if (s == "nan") return kNaN;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception &) {
    throw ConfigError("not a number: '" + s + "'");
  }
  if (pos != s.size()) throw ConfigError("not a number: '" + s + "'");
  return v;
}

std::string trim(std::string s) {
  s.erase(0, s.find_first_not_of(" \t\r"));
  s.erase(s.find_last_not_of(" \t\r") + 1);
  return s;
}

SweepEntry run_entry(const ProblemSpec &spec, const Certificate &cert, double eps, bool refine, Form form,
                     SolveTrace *keep) {
  SweepEntry e;
  e.eps = eps;
  e.bound_threshold = cert.threshold(eps);
  e.c4_bound = cert.c4 * std::pow(eps, -cert.lifespan_exponent);
  e.t_num = e.threshold_sensitivity = e.dt_delta = kNaN;
  try {
    SolveOptions so;
    so.refine_dt = refine;
    so.compute_g1 = keep != nullptr;
    auto tr = solve(spec, eps, form, so);
    if (!tr.blowup) {
      e.status = "no_blowup";
    } else if (tr.blowup->instability) {
      e.status = "instability";
    } else {
      e.status = "blowup";
      e.t_num = tr.blowup->t_num;
      e.threshold_sensitivity = tr.blowup->threshold_sensitivity;
      e.dt_delta = tr.blowup->dt_refinement_delta;
      e.bound_ok = e.t_num <= e.bound_threshold;
      e.c4_ok = e.t_num <= e.c4_bound;
    }
    if (keep) *keep = std::move(tr);
  } catch (const std::exception &ex) {
    e.status = std::string("error: ") + ex.what();
  }
  return e;
}

}  // namespace

RefinePolicy parse_refine_policy(const std::string &s) {
  if (s == "none") return RefinePolicy::none;
  if (s == "smallest") return RefinePolicy::smallest;
  if (s == "all") return RefinePolicy::all;
  throw InvalidArgument("unknown refine policy '" + s + "' (expected none|smallest|all)");
}

std::string to_string(RefinePolicy r) {
  switch (r) {
    case RefinePolicy::none: return "none";
    case RefinePolicy::smallest: return "smallest";
    case RefinePolicy::all: return "all";
  }
  return "none";
}

bool SweepEntry::usable_for_fit() const {
  return blew_up() && std::isfinite(t_num) && t_num > 0.0 && std::isfinite(threshold_sensitivity) &&
         threshold_sensitivity < kSensitivityFraction * t_num;
}

ScalingFit fit_scaling(const std::vector<double> &eps, const std::vector<double> &t_num) {
  if (eps.size() != t_num.size()) throw InvalidArgument("fit_scaling: size mismatch");
  if (eps.size() < 3) throw InvalidArgument("fit_scaling: insufficient data (need >= 3 entries)");
  const std::size_t N = eps.size();
  std::vector<double> x(N), y(N);
  for (std::size_t i = 0; i < N; ++i) {
    if (!(eps[i] > 0.0) || !(t_num[i] > 0.0)) throw InvalidArgument("fit_scaling: entries must be positive");
    x[i] = std::log(eps[i]);
    y[i] = std::log(t_num[i]);
  }
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= N;
  my /= N;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw InvalidArgument("fit_scaling: eps values are not distinct");
  ScalingFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double sse = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double r = y[i] - (f.intercept + f.slope * x[i]);
    sse += r * r;
  }
  f.r_squared = syy > 0.0 ? 1.0 - sse / syy : 1.0;
  return f;
}

double SweepResult::bound_fn(double eps) const {
  return std::max(cert_t0 + cert_c4 * std::pow(eps, -lifespan_exponent), 2.0 * cert_t0 + 1.0);
}

void summarize(SweepResult &res) {
  std::vector<double> xs, ys;
  for (const auto &e : res.entries)
    if (e.usable_for_fit()) {
      xs.push_back(e.eps);
      ys.push_back(e.t_num);
    }
  res.monotone = true;
  for (std::size_t i = 1; i < ys.size(); ++i)
    if (!(ys[i] > (1.0 - kMonotoneSlack) * ys[i - 1])) res.monotone = false;
  if (xs.size() >= 3) {
    res.fit = fit_scaling(xs, ys);
    res.fit_status = "ok";
  } else {
    res.fit.reset();
    res.fit_status = "insufficient data";
  }
}

SweepResult sweep(const ProblemSpec &spec, const std::vector<double> &eps_list, const SweepOptions &opt) {
  spec.validate();
  if (eps_list.empty()) throw InvalidArgument("sweep: eps list is empty");
  if (opt.jobs < 1) throw InvalidArgument("sweep: jobs must be >= 1");
  std::set<double> distinct;
  for (double e : eps_list) {
    if (!(e > 0.0) || !std::isfinite(e)) throw InvalidArgument("sweep: eps values must be positive");
    if (!distinct.insert(e).second) throw InvalidArgument("sweep: eps values must be distinct");
  }
  std::vector<double> eps(eps_list);
  std::sort(eps.begin(), eps.end(), std::greater<>());

  const Certificate cert = compute_constants(spec);
  SweepResult res;
  res.spec = spec;
  res.cert_t0 = cert.t0;
  res.cert_c4 = cert.c4;
  res.cert_eps0 = cert.eps0();
  res.lifespan_exponent = cert.lifespan_exponent;
  res.predicted_slope = -cert.lifespan_exponent;
  res.entries.resize(eps.size());
  if (opt.keep_traces) res.traces.resize(eps.size());

  auto refine_for = [&](std::size_t i) {
    switch (opt.refine) {
      case RefinePolicy::none: return false;
      case RefinePolicy::all: return true;
      case RefinePolicy::smallest: return i + 1 == eps.size();
    }
    return false;
  };

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < eps.size(); i = next++)
      res.entries[i] = run_entry(spec, cert, eps[i], refine_for(i), opt.form,
                                 opt.keep_traces ? &res.traces[i] : nullptr);
  };
  const int nthreads = static_cast<int>(std::min<std::size_t>(opt.jobs, eps.size()));
  if (nthreads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(nthreads);
    for (int k = 0; k < nthreads; ++k) pool.emplace_back(worker);
  }
  summarize(res);
  return res;
}

std::vector<double> parse_eps_list(const std::string &csv) {
  std::vector<double> out;
  std::istringstream in(csv);
  for (std::string cell; std::getline(in, cell, ',');) {
    cell = trim(cell);
    if (cell.empty()) throw InvalidArgument("eps list: empty item");
    out.push_back(parse_num(cell));
  }
  if (out.empty()) throw InvalidArgument("eps list is empty");
  return out;
}

std::string sweep_to_csv(const SweepResult &res) {
  std::ostringstream os;
  std::istringstream echo(echo_problem(res.spec));
  for (std::string line; std::getline(echo, line);) os << "# " << line << '\n';
  os << "# cert_t0 = " << num(res.cert_t0) << '\n'
     << "# cert_c4 = " << num(res.cert_c4) << '\n'
     << "# cert_eps0 = " << num(res.cert_eps0) << '\n'
     << "# lifespan_exponent = " << num(res.lifespan_exponent) << '\n'
     << "# predicted_slope = " << num(res.predicted_slope) << '\n';
  if (res.fit) {
    os << "# fitted_slope = " << num(res.fit->slope) << '\n'
       << "# fitted_intercept = " << num(res.fit->intercept) << '\n'
       << "# fitted_r_squared = " << num(res.fit->r_squared) << '\n';
  }
  os << "# fit_status = " << res.fit_status << '\n'
     << "# monotone = " << (res.monotone ? "true" : "false") << '\n';
  os << kSweepHeader << '\n';
  for (const auto &e : res.entries) {
    std::string status = e.status;
    std::replace(status.begin(), status.end(), ',', ';');
    std::replace(status.begin(), status.end(), '\n', ' ');
    os << num(e.eps) << ',' << num(e.t_num) << ',' << num(e.threshold_sensitivity) << ',' << num(e.dt_delta)
       << ',' << num(e.bound_threshold) << ',' << (e.bound_ok ? "true" : "false") << ',' << num(e.c4_bound)
       << ',' << (e.c4_ok ? "true" : "false") << ',' << status << '\n';
  }
  return os.str();
}

SweepResult sweep_from_csv(const std::string &text) {
  static const std::set<std::string> problem_keys = {
      "n", "mu", "p", "R", "f_amplitude", "f_k", "g_amplitude", "g_k",
      "dr", "cfl", "t_max", "output_stride", "blowup_threshold"};
  SweepResult res;
  std::ostringstream config;
  bool header_seen = false;
  std::istringstream in(text);
  auto to_bool = [](const std::string &s) {
    if (s == "true") return true;
    if (s == "false") return false;
    throw ConfigError("sweep CSV: expected true/false, got '" + s + "'");
  };
  for (std::string line; std::getline(in, line);) {
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      const std::string key = trim(line.substr(1, eq - 1));
      const std::string val = trim(line.substr(eq + 1));
      if (problem_keys.count(key)) config << key << " = " << val << '\n';
      else if (key == "cert_t0") res.cert_t0 = parse_num(val);
      else if (key == "cert_c4") res.cert_c4 = parse_num(val);
      else if (key == "cert_eps0") res.cert_eps0 = parse_num(val);
      else if (key == "lifespan_exponent") res.lifespan_exponent = parse_num(val);
      else if (key == "predicted_slope") res.predicted_slope = parse_num(val);
      continue;
    }
    if (!header_seen) {
      if (trim(line) != kSweepHeader) throw ConfigError("sweep CSV: unexpected header '" + line + "'");
      header_seen = true;
      continue;
    }
    std::vector<std::string> cells;
    std::istringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(trim(c));
    if (cells.size() != 9) throw ConfigError("sweep CSV: expected 9 columns in '" + line + "'");
    SweepEntry e;
    e.eps = parse_num(cells[0]);
    e.t_num = parse_num(cells[1]);
    e.threshold_sensitivity = parse_num(cells[2]);
    e.dt_delta = parse_num(cells[3]);
    e.bound_threshold = parse_num(cells[4]);
    e.bound_ok = to_bool(cells[5]);
    e.c4_bound = parse_num(cells[6]);
    e.c4_ok = to_bool(cells[7]);
    e.status = cells[8];
    res.entries.push_back(e);
  }
  if (!header_seen) throw ConfigError("sweep CSV: missing header");
  std::istringstream cfg(config.str());
  res.spec = parse_problem(cfg);
  summarize(res);
  return res;
}

std::string sweep_summary(const SweepResult &res) {
  std::ostringstream os;
  os << "entries: " << res.entries.size() << '\n';
  std::size_t usable = 0, ok = 0, c4 = 0;
  for (const auto &e : res.entries) {
    usable += e.usable_for_fit();
    ok += e.bound_ok;
    c4 += e.c4_ok;
  }
  os << "usable for fit: " << usable << '\n'
     << "bound_ok: " << ok << " of " << res.entries.size() << '\n'
     << "c4_ok: " << c4 << " of " << res.entries.size() << '\n'
     << "predicted slope: " << num(res.predicted_slope) << '\n';
  if (res.fit) {
    os << "fitted slope: " << num(res.fit->slope) << '\n'
       << "fitted intercept: " << num(res.fit->intercept) << '\n'
       << "r squared: " << num(res.fit->r_squared) << '\n'
       << "slope difference: " << num(res.fit->slope - res.predicted_slope) << '\n';
  } else {
    os << "fit: " << res.fit_status << '\n';
  }
  os << "monotone lifespan (5% slack): " << (res.monotone ? "yes" : "no") << '\n';
  return os.str();
}

namespace {

void write_file(const std::filesystem::path &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ComputationError("cannot write " + path.string());
  out << content;
  if (!out) throw ComputationError("write failed for " + path.string());
}

std::string plot_script(const SweepResult &res) {
  std::ostringstream os;
  os << "#!/usr/bin/env python3\n"
     << "# Lifespan sweep: measured points, least-squares line and certified bound.\n"
     << "import math\n"
     << "import os\n"
     << "import sys\n\n"
     << "import matplotlib\n"
     << "matplotlib.use(\"Agg\")\n"
     << "import matplotlib.pyplot as plt\n\n"
     << "T0 = " << num(res.cert_t0) << "\n"
     << "C4 = " << num(res.cert_c4) << "\n"
     << "K = " << num(res.lifespan_exponent) << "\n"
     << "SLOPE = " << num(res.fit->slope) << "\n"
     << "INTERCEPT = " << num(res.fit->intercept) << "\n"
     << "PREDICTED = " << num(res.predicted_slope) << "\n\n"
     << "here = os.path.dirname(os.path.abspath(__file__))\n"
     << "xs, ys = [], []\n"
     << "with open(os.path.join(here, \"loglog.dat\")) as fh:\n"
     << "    for line in fh:\n"
     << "        if line.startswith(\"#\") or not line.strip():\n"
     << "            continue\n"
     << "        a, b = line.split()\n"
     << "        xs.append(float(a))\n"
     << "        ys.append(float(b))\n\n"
     << "def bound(log_eps):\n"
     << "    eps = math.exp(log_eps)\n"
     << "    return math.log(max(T0 + C4 * eps ** (-K), 2 * T0 + 1))\n\n"
     << "lo, hi = min(xs), max(xs)\n"
     << "grid = [lo + (hi - lo) * i / 100 for i in range(101)]\n"
     << "fig, ax = plt.subplots(figsize=(6, 4.5))\n"
     << "ax.plot(xs, ys, \"o\", label=\"measured T\")\n"
     << "ax.plot(grid, [INTERCEPT + SLOPE * x for x in grid], \"-\", label=\"fit, slope %.3f\" % SLOPE)\n"
     << "ax.plot(grid, [bound(x) for x in grid], \"--\", label=\"certified bound (k = %.3f)\" % K)\n"
     << "ax.set_xlabel(\"log eps\")\n"
     << "ax.set_ylabel(\"log T\")\n"
     << "ax.legend()\n"
     << "fig.tight_layout()\n"
     << "out = sys.argv[1] if len(sys.argv) > 1 else os.path.join(here, \"sweep.png\")\n"
     << "fig.savefig(out, dpi=120)\n";
  return os.str();
}

}  // namespace

std::vector<std::filesystem::path> emit_plots(const SweepResult &res, const std::filesystem::path &outdir) {
  std::error_code ec;
  std::filesystem::create_directories(outdir, ec);
  if (ec) throw ComputationError("cannot create " + outdir.string() + ": " + ec.message());
  std::vector<std::filesystem::path> written;

  std::ostringstream dat;
  std::size_t points = 0;
  dat << "# log_eps log_t_num\n";
  for (const auto &e : res.entries)
    if (e.usable_for_fit()) {
      dat << num(std::log(e.eps)) << ' ' << num(std::log(e.t_num)) << '\n';
      ++points;
    }

  if (points > 0 && res.fit) {
    write_file(outdir / "loglog.dat", dat.str());
    written.push_back(outdir / "loglog.dat");
    write_file(outdir / "plot_sweep.py", plot_script(res));
    written.push_back(outdir / "plot_sweep.py");
  }
  write_file(outdir / "summary.txt", sweep_summary(res));
  written.push_back(outdir / "summary.txt");
  return written;
}

}  // namespace sdwave
