#pragma once

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "sdwave/certificate.hpp"
#include "sdwave/problem.hpp"

namespace sdwave {

/// Original damped form, or the Liouville-transformed Klein-Gordon form for
/// w = (1+t)^{mu/2} u:  w_tt - Laplace w + mu(2-mu)/(4(1+t)^2) w = |w|^p / (1+t)^{mu(p-1)/2}.
enum class Form { original, liouville };

std::string to_string(Form f);
Form parse_form(const std::string &s);

struct RadialGrid {
  double dr = 0.0;
  double L = 0.0;  ///< outer radius, t_max + R + 2 dr
  int M = 0;       ///< nodes r_i = i dr, i = 0..M
  double dt = 0.0;

  static RadialGrid make(double dr, double cfl, double t_max, double support0);
  double r(int i) const { return i * dr; }
};

/// Radial Cauchy problem in terms of the original unknown u. Data for the
/// Liouville form are derived from these: w(0) = u0, w_t(0) = (mu/2) u0 + u1.
struct InitialValueProblem {
  int n = 3;
  double mu = 2.0;
  double p = 1.5;
  Form form = Form::original;
  std::function<double(double)> u0;
  std::function<double(double)> u1;
  /// Extra source added to the right side of the integrated form's equation.
  std::function<double(double, double)> forcing;
  /// Radius containing the support of the data (and of the forcing).
  double support0 = 1.0;
  bool nonlinear = true;
};

struct EngineOptions {
  double t_max = 1.0;
  int output_stride = 1;
  double threshold = 1e6;
  std::vector<double> snapshot_times;
  bool compute_g1 = true;
};

struct Snapshot {
  double t = 0.0;
  Form form = Form::original;
  std::vector<double> field;  ///< u for the original form, w for the Liouville form
};

struct BlowupRecord {
  double t_num = 0.0;
  double threshold_used = 0.0;
  /// |T(threshold) - T(threshold / 100)|; NaN when the lower crossing is missing.
  double threshold_sensitivity = 0.0;
  /// |T(dt) - T(dt/2)|; NaN unless a refinement run was requested.
  double dt_refinement_delta = 0.0;
  bool instability = false;
};

/// Functionals are always reported for u, whichever form was integrated.
struct SolveTrace {
  std::vector<double> times;
  std::vector<double> G;
  std::vector<double> G1;
  std::vector<double> Lp;
  std::vector<double> max_abs_u;
  std::vector<double> key_residual;
  std::vector<double> support_radius;

  /// max |u| after every time step, used for threshold crossings.
  std::vector<double> step_times;
  std::vector<double> step_max_abs_u;

  std::optional<BlowupRecord> blowup;
  std::string terminated_reason;
  std::vector<Snapshot> snapshots;

  Form form = Form::original;
  double eps = 0.0;
  double dr = 0.0;
  double dt = 0.0;
  double mu = 0.0;
  /// G'(0) = int u_t(0) dx from the data; NaN when unknown.
  double g_prime0 = std::numeric_limits<double>::quiet_NaN();
};

/// Explicit second-order integration on the radial grid. Updates are
/// confined to r <= support0 + t + dr; u(0) follows from even symmetry.
SolveTrace integrate(const InitialValueProblem &ivp, const RadialGrid &grid, const EngineOptions &opt);

/// First threshold crossing of max|u| in the per-step record, with the crossing
/// of threshold/100 for the sensitivity diagnostic. Requires threshold >= 1e3.
std::optional<BlowupRecord> detect_blowup(const SolveTrace &trace, double threshold);

/// (1+t)^mu G'(t) - G'(0) - int_0^t (1+s)^mu Lp(s) ds, normalized by
/// |G'(0)| + |integral| so that it stays well defined as t -> 0. G'(0) is
/// taken from trace.g_prime0 when finite, else differenced from G.
std::vector<double> key_identity_residual(const SolveTrace &trace, double mu);

struct SolveOptions {
  bool refine_dt = false;  ///< rerun with dt/2 to fill dt_refinement_delta
  std::vector<double> snapshot_times;
  bool compute_g1 = true;
};

SolveTrace solve(const ProblemSpec &spec, double eps, Form form, const SolveOptions &opt = {});

struct LowerBoundReport {
  bool skipped = false;
  std::string reason;
  int checked_points = 0;
  double t_from = 0.0;
  double t_to = 0.0;
  double margin_lp = 0.0;  ///< min LHS/RHS
  double margin_g = 0.0;
  double margin_g1 = 0.0;
  bool ok() const { return skipped || (margin_lp >= 1.0 && margin_g >= 1.0 && margin_g1 >= 1.0); }
};

/// Checks the a priori lower bounds for Lp, G and G1 at recorded times in
/// (T0, t_upper] (t_upper defaults to the end of the trace).
LowerBoundReport verify_lower_bounds(const SolveTrace &trace, const Certificate &cert, double eps,
                                     std::optional<double> t_upper = std::nullopt);

/// CSV with columns t, G, G1, Lp, max_abs_u, key_residual, support_radius,
/// preceded by `# ` comment lines that echo the configuration.
std::string trace_to_csv(const SolveTrace &trace, const std::string &header_comment);
SolveTrace trace_from_csv(const std::string &text);

std::string trace_meta_json(const SolveTrace &trace);

}  // namespace sdwave
