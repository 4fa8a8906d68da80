#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace csbm {

/// Label-conditioned attribute model. Gaussian: class +1 draws N(mu, I/m),
/// class -1 draws N(nu, I/m). Laplace: entry i of class y draws
/// Laplace(y * mu[i], b). Nef carries natural parameters for the affine
/// likelihood-ratio transform only; it is not sampleable.
struct AttributeSpec {
  enum class Kind { gaussian, laplace, nef };

  Kind kind = Kind::gaussian;
  std::vector<double> mu;      // gaussian: class +1 mean; laplace: +/- location; nef: theta_1
  std::vector<double> nu;      // gaussian: class -1 mean; nef: theta_-1
  double b = 1.0;              // laplace scale
  double delta_log_partition = 0.0;  // nef: M(theta_1) - M(theta_-1)

  std::size_t dim() const { return mu.size(); }

  static AttributeSpec gaussian(std::vector<double> mu, std::vector<double> nu);
  // Symmetric Gaussian pair mu = +sep/2 * u, nu = -mu along the unit diagonal.
  static AttributeSpec gaussian_symmetric(double separation, std::size_t m);
  static AttributeSpec laplace(std::vector<double> mu, double b);
  static AttributeSpec laplace_symmetric(double mu_norm, double b, std::size_t m);
  static AttributeSpec nef(std::vector<double> theta1, std::vector<double> theta_neg1, double delta_m);

  void validate() const;  // throws std::invalid_argument on bad parameters
};

struct CsbmParams {
  std::uint64_t n = 0;
  double p = 0.0;  // intra-class edge probability
  double q = 0.0;  // inter-class edge probability
  AttributeSpec attr;
  std::uint64_t seed = 0;

  void validate() const;
  // Propagation additionally needs a finite log(p/q).
  void validate_for_propagation() const;
};

/// Immutable after construction; safe to share read-only across threads.
/// Adjacency is CSR with per-node neighbor lists sorted ascending, symmetric,
/// self-loop free.
struct AttributedGraph {
  std::uint32_t n = 0;
  std::uint32_t m = 0;  // attribute dimension
  std::vector<std::int64_t> offsets;     // size n + 1
  std::vector<std::uint32_t> neighbors;  // size 2 * #edges
  std::vector<std::int8_t> labels;       // entries in {-1, +1}
  std::vector<double> attrs;             // n x m, row-major

  // Provenance: CSBM parameters when generated, or an external source tag.
  std::optional<CsbmParams> params;
  std::string source_tag;

  std::int64_t num_edges() const { return static_cast<std::int64_t>(neighbors.size()) / 2; }

  std::span<const std::uint32_t> neighbors_of(std::uint32_t v) const {
    return {neighbors.data() + offsets[v], neighbors.data() + offsets[v + 1]};
  }
  std::int64_t degree(std::uint32_t v) const { return offsets[v + 1] - offsets[v]; }
  std::span<const double> attr_row(std::uint32_t v) const {
    return {attrs.data() + static_cast<std::size_t>(v) * m, m};
  }

  // Builds CSR from an undirected edge list (u < v pairs); sorts neighbor lists.
  static AttributedGraph from_edge_list(std::uint32_t n, std::uint32_t m,
                                        const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
                                        std::vector<std::int8_t> labels, std::vector<double> attrs);

  void check_invariants() const;  // throws std::logic_error if malformed
};

struct DegreeStats {
  std::vector<std::int64_t> degree;
  std::vector<double> same_class_fraction;  // 0 for isolated nodes
};

DegreeStats degree_stats(const AttributedGraph& g);

}  // namespace csbm
