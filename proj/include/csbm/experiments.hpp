#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "csbm/graph.hpp"

namespace csbm {

/// Closed-form schedule rule value(n) = coef * log(n)^log_exp * n^n_exp.
/// Covers every parameter block used by the experiment presets
/// (a / sqrt(n), c * log^2(n) / sqrt(n), sqrt(log n), constants, ...).
struct ScheduleRule {
  double coef = 0.0;
  double log_exp = 0.0;
  double n_exp = 0.0;

  double operator()(std::uint64_t n) const;
  static ScheduleRule constant(double c) { return {c, 0.0, 0.0}; }
};

struct SweepSpec {
  std::string name;
  ScheduleRule rule_p;
  ScheduleRule rule_q;
  ScheduleRule rule_sep;  // |mu - nu|_2 for Gaussian attributes
  std::uint64_t m = 10;
  std::vector<std::uint64_t> n_grid;
  std::uint64_t trials = 5;
  double linear_w = 0.0;  // 0 = auto: sign(p - q)
  std::uint64_t master_seed = 0;
};

struct SweepRow {
  std::uint64_t n = 0;
  double p = 0.0, q = 0.0, sep = 0.0;
  std::string model;
  std::string regime;
  double mean_accuracy = 0.0;
  double std_accuracy = 0.0;
  std::vector<double> trial_accuracy;
  std::vector<std::uint64_t> trial_seeds;
};

struct ExperimentResult {
  std::string name;
  std::vector<SweepRow> rows;
};

struct TrialModels {
  bool nonlinear = true;
  std::vector<double> linear_ws = {1.0};
};

struct TrialResult {
  double acc_nonlinear = 0.0;
  std::vector<double> acc_linear;
};

/// Samples one CSBM graph (streaming; adjacency never materialized) and
/// scores every node under the requested models. Deterministic per seed and
/// identical to scoring a sample_csbm graph with the same parameters.
TrialResult run_accuracy_trial(const CsbmParams& params, const TrialModels& models);

/// One row per (n, model); trial seeds derive from (master_seed, point, trial)
/// so grid points and trials can run concurrently with stable output.
ExperimentResult sweep_n(const SweepSpec& spec, int threads = 0);

struct TransitionSpec {
  std::string name;
  std::uint64_t n = 20000;
  std::uint64_t m = 10;
  bool homophilic = true;     // true: q fixed, p sweeps; false: p fixed, q sweeps
  double fixed_prob = 5e-3;   // the non-swept probability
  std::vector<double> swept_probs;  // log-spaced from fixed_prob to 1
  std::vector<double> sep_levels;   // log-spaced |mu - nu|
  std::uint64_t trials = 5;
  std::uint64_t master_seed = 0;

  static std::vector<double> log_grid(double lo, double hi, std::size_t count);
};

struct TransitionRow {
  double p = 0.0, q = 0.0, sep = 0.0;
  bool skipped = false;  // p = q point, nonlinear undefined
  double acc_nonlinear = 0.0;
  double acc_linear = 0.0;
  double gap = 0.0;
};

struct TransitionResult {
  std::string name;
  std::uint64_t n = 0;
  std::vector<TransitionRow> rows;
};

TransitionResult transition_curve(const TransitionSpec& spec, int threads = 0);

struct TransferSpec {
  std::string name;
  std::uint64_t n = 20000;
  std::uint64_t m = 10;
  ScheduleRule rule_p;
  ScheduleRule rule_q;
  ScheduleRule rule_sep;
  std::vector<double> intensities;  // 1 - cos(theta) levels
  std::uint64_t trials = 20;
  std::uint64_t master_seed = 0;
};

struct TransferRow {
  double intensity = 0.0;
  double theta = 0.0;
  double dxi_nonlinear = 0.0;
  double dxi_nonlinear_se = 0.0;
  double dxi_linear = 0.0;
  double dxi_linear_se = 0.0;
  double ratio = 0.0;
  double ratio_se = 0.0;
  bool flagged = false;  // |dxi_linear| below 3x its standard error; ratio unreliable
};

struct TransferResult {
  std::string name;
  std::uint64_t n = 0;
  std::vector<TransferRow> rows;
};

/// Rotates (mu, nu) in the plane spanned by mu - nu and a deterministic
/// orthonormal complement (first non-parallel standard basis vector,
/// Gram-Schmidt). Norm and midpoint preserved to 1e-12 by construction.
/// Test attributes at each intensity reuse the unshifted noise (common random
/// numbers), so dxi = error(shifted) - error(unshifted) per trial is paired.
TransferResult transfer_experiment(const TransferSpec& spec, int threads = 0);

/// Rotated mean pair for one intensity; exposed for tests.
std::pair<std::vector<double>, std::vector<double>> rotate_mean_pair(const std::vector<double>& mu,
                                                                     const std::vector<double>& nu, double theta);

struct WSweepSpec {
  std::string name;
  ScheduleRule rule_p;
  ScheduleRule rule_q;
  ScheduleRule rule_sep;
  std::uint64_t m = 10;
  std::vector<double> w_grid;
  std::vector<std::uint64_t> n_grid;
  std::uint64_t trials = 5;
  std::uint64_t master_seed = 0;
};

/// Linear-model accuracy per (w, n); one streamed graph per trial scores all w.
ExperimentResult w_sweep(const WSweepSpec& spec, int threads = 0);

// Preset catalogue: the named experiment parameter blocks
// (fig3-left, fig3-middle, fig3-right, fig4-limited, fig4-suff, fig5-homo,
// fig5-hetero, fig7-limited, fig7-fixed, fig7-suff, fig8-limited, fig8-fixed,
// fig8-suff). Throws on unknown names.
SweepSpec sweep_preset(const std::string& name, std::uint64_t master_seed);
TransitionSpec transition_preset(const std::string& name, std::uint64_t master_seed);
TransferSpec transfer_preset(const std::string& name, std::uint64_t master_seed);
WSweepSpec wsweep_preset(const std::string& name, std::uint64_t master_seed);
std::vector<std::string> preset_names();

/// Trial seed derivation, shared by all experiment drivers.
std::uint64_t trial_seed(std::uint64_t master_seed, std::uint64_t point_index, std::uint64_t trial_index);

/// Spearman rank correlation (average-rank ties), used by monotonicity checks.
double spearman(std::span<const double> xs, std::span<const double> ys);

}  // namespace csbm
