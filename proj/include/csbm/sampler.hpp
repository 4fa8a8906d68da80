#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "csbm/graph.hpp"
#include "csbm/rng.hpp"

namespace csbm {

/// Samples labels, topology and attributes of a CSBM graph. A single call is
/// internally single-threaded; independent calls may run concurrently.
AttributedGraph sample_csbm(const CsbmParams& params);

/// Labels i.i.d. Rademacher from the label stream of `seed`.
std::vector<std::int8_t> sample_labels(std::uint64_t n, Rng labels_rng);

/// n x m attribute matrix, row v drawn from the class-y_v distribution.
std::vector<double> sample_attributes(const std::vector<std::int8_t>& labels, const AttributeSpec& spec,
                                      Rng attrs_rng);

/// Streams every sampled undirected edge (u, v), u < v, to `emit` without
/// materializing adjacency. Identical RNG consumption to sample_csbm, so a
/// given (params, labels) yields the same topology on both paths.
///
/// Edge sampling is geometric-skip enumeration over the three class-pair
/// blocks (++, --, +-) in lexicographic pair order: expected O(#edges) work,
/// which is what makes the n = 2e5 sweeps feasible.
void stream_csbm_edges(const std::vector<std::int8_t>& labels, double p, double q, Rng edges_rng,
                       const std::function<void(std::uint32_t, std::uint32_t)>& emit);

}  // namespace csbm
