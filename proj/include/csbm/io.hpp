#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csbm/experiments.hpp"
#include "csbm/graph.hpp"

namespace csbm {

inline constexpr const char* kToolVersion = "csbmlab 1.0.0";

/// Shortest decimal form that round-trips the exact double (std::to_chars).
/// Locale-independent, '.' decimal separator always.
std::string format_double(double x);
double parse_double(const std::string& s);

/// Graph files rooted at `base`:
///   base.json       header (n, m, params, seed or source tag, companion files)
///   base.edges      one "u v" per line, u < v, ascending
///   base.labels     one {-1, +1} per line, row i = node i
///   base.attrs.csv  n rows x m columns
/// Round-trip is bit-exact, attributes included.
void save_graph(const AttributedGraph& g, const std::string& base);
AttributedGraph load_graph(const std::string& base);

void write_sweep_csv(const ExperimentResult& result, const std::string& path);
void write_transition_csv(const TransitionResult& result, const std::string& path);
void write_transfer_csv(const TransferResult& result, const std::string& path);

/// Score dump: node, label, score_nonlinear, score_linear, pred_nl, pred_lin.
void write_scores_csv(const AttributedGraph& g, const std::vector<double>& nonlinear,
                      const std::vector<double>& linear, const std::string& path);

struct RunManifest {
  std::string subcommand;
  std::string parameters_json;  // fully resolved spec as a JSON fragment
  std::uint64_t master_seed = 0;
  int threads = 0;
  std::vector<std::string> outputs;
  double wall_clock_sec = 0.0;
};

void write_manifest(const RunManifest& manifest, const std::string& path);

}  // namespace csbm
