// Command-line front end: exponents, certificate, solve, sweep, verify, plot.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "sdwave/certificate.hpp"
#include "sdwave/error.hpp"
#include "sdwave/exponents.hpp"
#include "sdwave/harness.hpp"
#include "sdwave/problem.hpp"
#include "sdwave/solver.hpp"

using namespace sdwave;
using nlohmann::ordered_json;

namespace {

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path);
  out << content;
}

ordered_json jnum(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

ordered_json to_json(const CompetingExponent &c) {
  return {{"applicable", c.applicable}, {"exponent", c.applicable ? jnum(c.exponent) : nullptr},
          {"condition", c.condition}};
}

ordered_json to_json(const ExponentReport &r) {
  ordered_json j;
  j["n"] = r.n;
  j["mu"] = r.mu;
  j["p"] = r.p;
  j["gamma_shifted"] = jnum(r.gamma_shifted);
  j["p_strauss_shifted"] = jnum(r.p_strauss_shifted);
  j["p_fujita"] = jnum(r.p_fujita);
  j["mu_star"] = jnum(r.mu_star);
  j["lifespan_exp_this_paper"] = jnum(r.lifespan_exp_this_paper);
  j["lifespan_exp_ltw"] = to_json(r.lifespan_exp_ltw);
  j["lifespan_exp_is"] = {{"regime", to_string(r.lifespan_exp_is.regime)},
                          {"exponent", r.lifespan_exp_is.regime == IsRegime::not_applicable
                                           ? ordered_json(nullptr)
                                           : jnum(r.lifespan_exp_is.exponent)},
                          {"descriptor", r.lifespan_exp_is.descriptor}};
  j["lifespan_exp_wakasugi"] = to_json(r.lifespan_exp_wakasugi);
  j["remark_improvement"] = r.remark_improvement;
  j["remark"] = {{"in_range", r.remark.in_range},
                 {"inequality", to_string(r.remark.inequality)},
                 {"this_exponent", jnum(r.remark.this_exponent)},
                 {"wakasugi_exponent", jnum(r.remark.wakasugi_exponent)},
                 {"which", r.remark.which},
                 {"reason", r.remark.reason}};
  return j;
}

std::string fmt(double x) {
  if (std::isnan(x)) return "n/a";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  std::ostringstream os;
  os << std::setprecision(10) << x;
  return os.str();
}

void print_report(const ExponentReport &r) {
  auto row = [](const std::string &k, const std::string &v) {
    std::cout << std::left << std::setw(26) << k << v << '\n';
  };
  auto competing = [&](const std::string &k, const CompetingExponent &c) {
    row(k, (c.applicable ? fmt(c.exponent) : std::string("not applicable")) + "  [" + c.condition + "]");
  };
  row("n", std::to_string(r.n));
  row("mu", fmt(r.mu));
  row("p", fmt(r.p));
  row("gamma(p, n+mu)", fmt(r.gamma_shifted));
  row("p_S(n+mu)", fmt(r.p_strauss_shifted));
  row("p_F(n)", fmt(r.p_fujita));
  row("mu_*", fmt(r.mu_star));
  row("lifespan exponent", fmt(r.lifespan_exp_this_paper));
  competing("LTW exponent", r.lifespan_exp_ltw);
  row("IS exponent",
      (r.lifespan_exp_is.regime == IsRegime::not_applicable ? std::string("not applicable")
                                                            : fmt(r.lifespan_exp_is.exponent)) +
          "  [" + to_string(r.lifespan_exp_is.regime) + ": " + r.lifespan_exp_is.descriptor + "]");
  competing("Wakasugi exponent", r.lifespan_exp_wakasugi);
  row("improvement", std::string(r.remark_improvement ? "yes" : "no") + "  [" + r.remark.reason + "]");
}

std::string certificate_text(const Certificate &c) {
  std::ostringstream os;
  os << "T0 = " << fmt(c.t0) << ", C4 = " << fmt(c.c4) << ", k = " << fmt(c.lifespan_exponent)
     << ", eps0 = " << fmt(c.eps0()) << '\n';
  return os.str();
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Blow-up and lifespan lab for the scale-invariant damped semilinear wave equation"};
  app.require_subcommand(1);

  int ex_n = 3;
  double ex_mu = 2.0, ex_p = std::numeric_limits<double>::quiet_NaN();
  bool ex_json = false;
  auto *ex = app.add_subcommand("exponents", "critical and lifespan exponents for (n, mu, p)");
  ex->add_option("--n", ex_n, "space dimension")->required();
  ex->add_option("--mu", ex_mu, "damping coefficient")->required();
  ex->add_option("--p", ex_p, "nonlinearity power (default: midpoint of (1, p_S(n+mu)))");
  ex->add_flag("--json", ex_json, "print a single JSON object");

  std::string config, out;
  auto *ce = app.add_subcommand("certificate", "compute the explicit blow-up constants");
  ce->add_option("--config", config, "problem file")->required()->check(CLI::ExistingFile);
  ce->add_option("--out", out, "output JSON")->required();

  double eps = 0.0;
  std::string form = "original";
  bool refine = false;
  auto *so = app.add_subcommand("solve", "integrate one Cauchy problem");
  so->add_option("--config", config, "problem file")->required()->check(CLI::ExistingFile);
  so->add_option("--eps", eps, "data amplitude")->required()->check(CLI::PositiveNumber);
  so->add_option("--form", form, "original|liouville")->check(CLI::IsMember({"original", "liouville"}));
  so->add_option("--out", out, "trace CSV; the verdict goes to <out stem>.meta.json")->required();
  so->add_flag("--refine-dt", refine, "rerun with dt/2 to fill dt_refinement_delta");

  std::string eps_list, refine_policy = "smallest";
  int jobs = 1;
  auto *sw = app.add_subcommand("sweep", "lifespan sweep over eps");
  sw->add_option("--config", config, "problem file")->required()->check(CLI::ExistingFile);
  sw->add_option("--eps-list", eps_list, "comma separated eps values")->required();
  sw->add_option("--jobs", jobs, "concurrent solves")->check(CLI::PositiveNumber);
  sw->add_option("--refine", refine_policy, "dt refinement: none|smallest|all")
      ->check(CLI::IsMember({"none", "smallest", "all"}));
  sw->add_option("--out", out, "sweep CSV")->required();

  std::string trace_path, cert_path;
  auto *ve = app.add_subcommand("verify", "check a trace against a certificate");
  ve->add_option("--trace", trace_path, "trace CSV")->required()->check(CLI::ExistingFile);
  ve->add_option("--cert", cert_path, "certificate JSON")->required()->check(CLI::ExistingFile);

  std::string sweep_path;
  auto *pl = app.add_subcommand("plot", "emit plot data, script and summary");
  pl->add_option("--sweep", sweep_path, "sweep CSV")->required()->check(CLI::ExistingFile);
  pl->add_option("--out", out, "output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*ex) {
      if (std::isnan(ex_p)) ex_p = 0.5 * (1.0 + strauss_exponent(ex_n + ex_mu));
      const auto rep = lifespan_exponent_table(ex_n, ex_mu, ex_p);
      if (ex_json) std::cout << to_json(rep).dump(2) << '\n';
      else print_report(rep);
      return 0;
    }
    if (*ce) {
      const auto cert = compute_constants(load_problem(config));
      write_file(out, certificate_to_json(cert));
      std::cout << certificate_text(cert);
      return 0;
    }
    if (*so) {
      const auto spec = load_problem(config);
      SolveOptions opt;
      opt.refine_dt = refine;
      const auto tr = solve(spec, eps, parse_form(form), opt);
      write_file(out, trace_to_csv(tr, echo_problem(spec)));
      std::filesystem::path meta(out);
      meta.replace_extension(".meta.json");
      write_file(meta.string(), trace_meta_json(tr));
      std::cout << "terminated: " << tr.terminated_reason;
      if (tr.blowup) std::cout << ", T_num = " << fmt(tr.blowup->t_num);
      std::cout << '\n';
      return 0;
    }
    if (*sw) {
      const auto spec = load_problem(config);
      SweepOptions opt;
      opt.jobs = jobs;
      opt.refine = parse_refine_policy(refine_policy);
      const auto res = sweep(spec, parse_eps_list(eps_list), opt);
      write_file(out, sweep_to_csv(res));
      std::cout << sweep_summary(res);
      return 0;
    }
    if (*ve) {
      const auto cert = certificate_from_json(read_file(cert_path));
      const auto tr = trace_from_csv(read_file(trace_path));
      const auto rep = verify_lower_bounds(tr, cert, tr.eps);
      const auto recomputed = key_identity_residual(tr, cert.spec.mu);
      const double t_end = tr.times.empty() ? 0.0 : tr.times.back();
      double worst = 0.0, worst_re = 0.0, worst_early = 0.0;
      for (std::size_t i = 0; i < tr.key_residual.size(); ++i) {
        worst = std::max(worst, std::abs(tr.key_residual[i]));
        worst_re = std::max(worst_re, std::abs(recomputed[i]));
        if (tr.times[i] <= 0.8 * t_end) worst_early = std::max(worst_early, std::abs(recomputed[i]));
      }
      std::cout << "key identity residual (stored / recomputed): " << fmt(worst) << " / " << fmt(worst_re)
                << '\n'
                << "key identity residual on [0, 0.8 t_end]: " << fmt(worst_early) << '\n';
      if (rep.skipped) {
        std::cout << "lower bounds: skipped (" << rep.reason << ")\n";
        return 0;
      }
      std::cout << "lower bounds on t in [" << fmt(rep.t_from) << ", " << fmt(rep.t_to) << "], "
                << rep.checked_points << " points\n"
                << "  margin Lp: " << fmt(rep.margin_lp) << '\n'
                << "  margin G:  " << fmt(rep.margin_g) << '\n'
                << "  margin G1: " << fmt(rep.margin_g1) << '\n';
      if (!rep.ok()) {
        std::cout << "bound violated\n";
        return 2;
      }
      std::cout << "all bounds hold\n";
      return 0;
    }
    if (*pl) {
      const auto res = sweep_from_csv(read_file(sweep_path));
      for (const auto &p : emit_plots(res, out)) std::cout << p.string() << '\n';
      return 0;
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
