#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csbm/graph.hpp"

namespace csbm {

/// Citation-network topology with its original multi-class labels.
struct LabeledTopology {
  std::string name;
  std::uint32_t n = 0;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;  // u < v, deduplicated
  std::vector<std::uint32_t> classes;                          // contiguous ids from 0
  std::uint32_t num_classes = 0;
  std::uint64_t dropped_self_loops = 0;
  std::uint64_t dropped_duplicates = 0;
};

/// Edge file: whitespace-separated "u v" per line, '#' comments allowed.
/// Label file: one non-negative integer per line, row i = node i. Self-loops
/// are dropped and duplicates deduplicated, both with counts reported in the
/// returned struct. Dangling endpoints (>= #labels) are an error.
LabeledTopology load_topology(const std::string& edge_file, const std::string& label_file,
                              const std::string& name = "");

struct BinarizationRule {
  enum class Kind { one_vs_all, several_vs_several };
  Kind kind = Kind::one_vs_all;
  std::vector<std::uint32_t> positive_classes;  // one id for one-vs-all

  static BinarizationRule one_vs_all(std::uint32_t cls) { return {Kind::one_vs_all, {cls}}; }
  static BinarizationRule several_vs_several(std::vector<std::uint32_t> positive) {
    return {Kind::several_vs_several, std::move(positive)};
  }
};

struct BinarizedLabels {
  std::vector<std::int8_t> labels;  // +1 = positive side
  std::uint64_t positive_count = 0;
  std::uint64_t negative_count = 0;
};

/// Positive side maps to +1. Errors if a named class is absent or a side ends
/// up empty.
BinarizedLabels binarize(const LabeledTopology& topo, const BinarizationRule& rule);

/// Empirical edge probabilities from a binarized topology. Zero-count sides
/// are floored at 1 / #pairs and flagged, so log(p/q) stays finite.
struct PqEstimate {
  double p = 0.0;
  double q = 0.0;
  bool p_floored = false;
  bool q_floored = false;
};
PqEstimate estimate_pq(const LabeledTopology& topo, const std::vector<std::int8_t>& labels);

/// Train/test pair sharing the fixed topology and labels; attributes drawn
/// independently per graph from substreams of `seed`.
std::pair<AttributedGraph, AttributedGraph> make_train_test_pair(const LabeledTopology& topo,
                                                                 const std::vector<std::int8_t>& labels,
                                                                 const AttributeSpec& spec, std::uint64_t seed);

/// Deterministic stand-in citation topology for environments without the real
/// datasets: a 7-class SBM at Cora scale with the published class sizes.
LabeledTopology make_surrogate_citation(std::uint64_t seed);

}  // namespace csbm
