#include "csbm/sampler.hpp"

#include <cmath>
#include <stdexcept>

namespace csbm {

namespace {

// Visits each index of [0, count) independently with probability prob, in
// increasing order, using geometric skips: O(prob * count) expected calls.
template <typename Visit>
void skip_sample(std::int64_t count, double prob, Rng& rng, Visit&& visit) {
  if (count <= 0 || prob <= 0.0) return;
  if (prob >= 1.0) {
    for (std::int64_t i = 0; i < count; ++i) visit(i);
    return;
  }
  const double denom = std::log1p(-prob);
  std::int64_t idx = -1;
  while (true) {
    const double u = rng.uniform01_open_left();
    idx += 1 + static_cast<std::int64_t>(std::floor(std::log(u) / denom));
    if (idx >= count || idx < 0) break;  // idx < 0 guards i64 overflow on tiny prob
    visit(idx);
  }
}

// Lexicographic (i < j) pair enumeration inside one sorted id block.
// Pair index L maps to row i, column j with row lengths (k-1), (k-2), ...
class IntraPairDecoder {
 public:
  explicit IntraPairDecoder(const std::vector<std::uint32_t>& ids) : ids_(ids), k_(static_cast<std::int64_t>(ids.size())) {}

  std::int64_t pair_count() const { return k_ * (k_ - 1) / 2; }

  // Requires non-decreasing L across calls.
  std::pair<std::uint32_t, std::uint32_t> decode(std::int64_t L) {
    while (L >= row_end_) {
      ++row_;
      row_start_ = row_end_;
      row_end_ += k_ - row_ - 1;
    }
    const std::int64_t j = row_ + 1 + (L - row_start_);
    return {ids_[static_cast<std::size_t>(row_)], ids_[static_cast<std::size_t>(j)]};
  }

 private:
  const std::vector<std::uint32_t>& ids_;
  std::int64_t k_;
  std::int64_t row_ = -1;
  std::int64_t row_start_ = 0;
  std::int64_t row_end_ = 0;
};

}  // namespace

std::vector<std::int8_t> sample_labels(std::uint64_t n, Rng labels_rng) {
  std::vector<std::int8_t> labels(n);
  for (auto& y : labels) y = (labels_rng.next_u64() & 1u) ? std::int8_t{1} : std::int8_t{-1};
  return labels;
}

std::vector<double> sample_attributes(const std::vector<std::int8_t>& labels, const AttributeSpec& spec,
                                      Rng attrs_rng) {
  spec.validate();
  const std::size_t n = labels.size();
  const std::size_t m = spec.dim();
  std::vector<double> attrs(n * m);
  switch (spec.kind) {
    case AttributeSpec::Kind::gaussian: {
      // Covariance I/m: per-entry stddev 1/sqrt(m).
      const double sd = 1.0 / std::sqrt(static_cast<double>(m));
      for (std::size_t v = 0; v < n; ++v) {
        const std::vector<double>& mean = labels[v] == 1 ? spec.mu : spec.nu;
        double* row = attrs.data() + v * m;
        for (std::size_t i = 0; i < m; ++i) row[i] = attrs_rng.normal(mean[i], sd);
      }
      break;
    }
    case AttributeSpec::Kind::laplace: {
      for (std::size_t v = 0; v < n; ++v) {
        const double y = static_cast<double>(labels[v]);
        double* row = attrs.data() + v * m;
        for (std::size_t i = 0; i < m; ++i) row[i] = attrs_rng.laplace(y * spec.mu[i], spec.b);
      }
      break;
    }
    case AttributeSpec::Kind::nef:
      throw std::invalid_argument("NEF attribute specs parameterize psi only; they are not sampleable");
  }
  return attrs;
}

void stream_csbm_edges(const std::vector<std::int8_t>& labels, double p, double q, Rng edges_rng,
                       const std::function<void(std::uint32_t, std::uint32_t)>& emit) {
  std::vector<std::uint32_t> plus, minus;
  plus.reserve(labels.size() / 2 + 1);
  minus.reserve(labels.size() / 2 + 1);
  for (std::uint32_t v = 0; v < labels.size(); ++v) {
    (labels[v] == 1 ? plus : minus).push_back(v);
  }

  // Block order (++, --, +-) is part of the sampling contract: it fixes the
  // RNG consumption so seeds reproduce topologies exactly.
  {
    IntraPairDecoder dec(plus);
    skip_sample(dec.pair_count(), p, edges_rng, [&](std::int64_t L) {
      auto [u, v] = dec.decode(L);
      emit(u, v);
    });
  }
  {
    IntraPairDecoder dec(minus);
    skip_sample(dec.pair_count(), p, edges_rng, [&](std::int64_t L) {
      auto [u, v] = dec.decode(L);
      emit(u, v);
    });
  }
  {
    const std::int64_t b = static_cast<std::int64_t>(minus.size());
    skip_sample(static_cast<std::int64_t>(plus.size()) * b, q, edges_rng, [&](std::int64_t L) {
      const std::uint32_t u = plus[static_cast<std::size_t>(L / b)];
      const std::uint32_t v = minus[static_cast<std::size_t>(L % b)];
      emit(u < v ? u : v, u < v ? v : u);
    });
  }
}

AttributedGraph sample_csbm(const CsbmParams& params) {
  params.validate();
  Rng master(params.seed);
  auto labels = sample_labels(params.n, master.stream(RngPurpose::labels));
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  const double expected =
      static_cast<double>(params.n) * static_cast<double>(params.n) / 4.0 * (params.p + params.q);
  edges.reserve(static_cast<std::size_t>(expected * 1.05) + 64);
  stream_csbm_edges(labels, params.p, params.q, master.stream(RngPurpose::edges),
                    [&](std::uint32_t u, std::uint32_t v) { edges.emplace_back(u, v); });
  auto attrs = sample_attributes(labels, params.attr, master.stream(RngPurpose::attrs));
  auto g = AttributedGraph::from_edge_list(static_cast<std::uint32_t>(params.n),
                                           static_cast<std::uint32_t>(params.attr.dim()), edges,
                                           std::move(labels), std::move(attrs));
  g.params = params;
  return g;
}

}  // namespace csbm
