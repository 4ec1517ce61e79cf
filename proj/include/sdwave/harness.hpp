#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sdwave/certificate.hpp"
#include "sdwave/problem.hpp"
#include "sdwave/solver.hpp"

namespace sdwave {

/// Which sweep entries get the dt/2 rerun for dt_refinement_delta.
enum class RefinePolicy { none, smallest, all };

RefinePolicy parse_refine_policy(const std::string &s);
std::string to_string(RefinePolicy r);

struct SweepEntry {
  double eps = 0.0;
  double t_num = 0.0;  ///< NaN when no blow-up was detected
  double threshold_sensitivity = 0.0;
  double dt_delta = 0.0;
  double bound_threshold = 0.0;  ///< threshold(eps) from the certificate
  bool bound_ok = false;
  double c4_bound = 0.0;  ///< C4 eps^{-k}
  bool c4_ok = false;
  /// blowup, no_blowup, instability, or error: <message>
  std::string status;

  bool blew_up() const { return status == "blowup"; }
  /// Blow-up detected with threshold sensitivity below 5% of T_num.
  bool usable_for_fit() const;
};

struct ScalingFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Ordinary least squares of log T on log eps. Throws InvalidArgument on fewer
/// than three points or on a degenerate eps set.
ScalingFit fit_scaling(const std::vector<double> &eps, const std::vector<double> &t_num);

struct SweepResult {
  ProblemSpec spec;
  double cert_t0 = 0.0;
  double cert_c4 = 0.0;
  double cert_eps0 = 0.0;
  double lifespan_exponent = 0.0;
  double predicted_slope = 0.0;
  std::vector<SweepEntry> entries;  ///< descending eps
  std::optional<ScalingFit> fit;
  /// "ok" or "insufficient data"
  std::string fit_status;
  /// usable entries have T_num increasing as eps decreases, up to 5% slack
  bool monotone = true;
  /// Same order as entries; filled only with SweepOptions::keep_traces.
  std::vector<SolveTrace> traces;

  double bound_fn(double eps) const;
};

struct SweepOptions {
  int jobs = 1;
  RefinePolicy refine = RefinePolicy::smallest;
  Form form = Form::original;
  /// Keep every trace (with G1) in SweepResult::traces for later checks.
  bool keep_traces = false;
};

/// Runs one solve per eps (up to `jobs` at a time) and aggregates the results
/// against a certificate computed once from `spec`.
SweepResult sweep(const ProblemSpec &spec, const std::vector<double> &eps_list, const SweepOptions &opt = {});

/// Fills fit, fit_status and monotone from the entries.
void summarize(SweepResult &res);

std::vector<double> parse_eps_list(const std::string &csv);

/// Columns eps, t_num, threshold_sensitivity, dt_delta, bound_threshold, bound_ok,
/// c4_bound, c4_ok, status; preceded by `# ` lines echoing the configuration and
/// the certificate quantities needed to redraw the bound.
std::string sweep_to_csv(const SweepResult &res);
SweepResult sweep_from_csv(const std::string &text);

/// Human-readable comparison of the fitted and predicted slopes.
std::string sweep_summary(const SweepResult &res);

/// Writes loglog.dat, plot_sweep.py and summary.txt into `outdir`; only
/// summary.txt when no entry is usable. Returns the paths written.
std::vector<std::filesystem::path> emit_plots(const SweepResult &res, const std::filesystem::path &outdir);

}  // namespace sdwave
