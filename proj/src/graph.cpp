#include "csbm/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace csbm {

AttributeSpec AttributeSpec::gaussian(std::vector<double> mu, std::vector<double> nu) {
  AttributeSpec s;
  s.kind = Kind::gaussian;
  s.mu = std::move(mu);
  s.nu = std::move(nu);
  s.validate();
  return s;
}

AttributeSpec AttributeSpec::gaussian_symmetric(double separation, std::size_t m) {
  if (m == 0) throw std::invalid_argument("attribute dimension must be positive");
  if (separation < 0.0) throw std::invalid_argument("separation must be non-negative");
  const double entry = separation / (2.0 * std::sqrt(static_cast<double>(m)));
  std::vector<double> mu(m, entry), nu(m, -entry);
  return gaussian(std::move(mu), std::move(nu));
}

AttributeSpec AttributeSpec::laplace(std::vector<double> mu, double b) {
  AttributeSpec s;
  s.kind = Kind::laplace;
  s.mu = std::move(mu);
  s.b = b;
  s.validate();
  return s;
}

AttributeSpec AttributeSpec::laplace_symmetric(double mu_norm, double b, std::size_t m) {
  if (m == 0) throw std::invalid_argument("attribute dimension must be positive");
  if (mu_norm < 0.0) throw std::invalid_argument("mu norm must be non-negative");
  std::vector<double> mu(m, mu_norm / std::sqrt(static_cast<double>(m)));
  return laplace(std::move(mu), b);
}

AttributeSpec AttributeSpec::nef(std::vector<double> theta1, std::vector<double> theta_neg1, double delta_m) {
  AttributeSpec s;
  s.kind = Kind::nef;
  s.mu = std::move(theta1);
  s.nu = std::move(theta_neg1);
  s.delta_log_partition = delta_m;
  s.validate();
  return s;
}

void AttributeSpec::validate() const {
  if (mu.empty()) throw std::invalid_argument("attribute dimension must be positive");
  for (double x : mu) {
    if (!std::isfinite(x)) throw std::invalid_argument("attribute parameters must be finite");
  }
  switch (kind) {
    case Kind::gaussian:
    case Kind::nef:
      if (nu.size() != mu.size()) throw std::invalid_argument("mu and nu dimensions differ");
      for (double x : nu) {
        if (!std::isfinite(x)) throw std::invalid_argument("attribute parameters must be finite");
      }
      break;
    case Kind::laplace:
      if (!(b > 0.0)) throw std::invalid_argument("laplace scale b must be > 0");
      break;
  }
}

void CsbmParams::validate() const {
  if (n == 0) throw std::invalid_argument("n must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must be in [0, 1]");
  if (!(q >= 0.0 && q <= 1.0)) throw std::invalid_argument("q must be in [0, 1]");
  attr.validate();
}

void CsbmParams::validate_for_propagation() const {
  validate();
  if (!(p > 0.0) || !(q > 0.0)) {
    throw std::invalid_argument("propagation requires p > 0 and q > 0 (log(p/q) must be finite)");
  }
}

AttributedGraph AttributedGraph::from_edge_list(
    std::uint32_t n, std::uint32_t m, const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges,
    std::vector<std::int8_t> labels, std::vector<double> attrs) {
  AttributedGraph g;
  g.n = n;
  g.m = m;
  g.labels = std::move(labels);
  g.attrs = std::move(attrs);
  g.offsets.assign(static_cast<std::size_t>(n) + 1, 0);
  for (const auto& [u, v] : edges) {
    g.offsets[u + 1]++;
    g.offsets[v + 1]++;
  }
  for (std::uint32_t i = 0; i < n; ++i) g.offsets[i + 1] += g.offsets[i];
  g.neighbors.resize(static_cast<std::size_t>(g.offsets[n]));
  std::vector<std::int64_t> cursor(g.offsets.begin(), g.offsets.end() - 1);
  for (const auto& [u, v] : edges) {
    g.neighbors[static_cast<std::size_t>(cursor[u]++)] = v;
    g.neighbors[static_cast<std::size_t>(cursor[v]++)] = u;
  }
  for (std::uint32_t v = 0; v < n; ++v) {
    std::sort(g.neighbors.begin() + g.offsets[v], g.neighbors.begin() + g.offsets[v + 1]);
  }
  return g;
}

void AttributedGraph::check_invariants() const {
  if (offsets.size() != static_cast<std::size_t>(n) + 1 || offsets[0] != 0 ||
      offsets[n] != static_cast<std::int64_t>(neighbors.size())) {
    throw std::logic_error("corrupt CSR offsets");
  }
  if (labels.size() != n) throw std::logic_error("label count mismatch");
  if (attrs.size() != static_cast<std::size_t>(n) * m) throw std::logic_error("attribute matrix shape mismatch");
  for (std::uint32_t v = 0; v < n; ++v) {
    if (labels[v] != 1 && labels[v] != -1) throw std::logic_error("label outside {-1, +1}");
    auto nb = neighbors_of(v);
    for (std::size_t i = 0; i < nb.size(); ++i) {
      if (nb[i] >= n) throw std::logic_error("neighbor index out of range");
      if (nb[i] == v) throw std::logic_error("self loop");
      if (i > 0 && nb[i - 1] >= nb[i]) throw std::logic_error("neighbor list not sorted strictly ascending");
      // symmetry: v must appear in nb[i]'s list
      auto other = neighbors_of(nb[i]);
      if (!std::binary_search(other.begin(), other.end(), v)) throw std::logic_error("asymmetric adjacency");
    }
  }
}

DegreeStats degree_stats(const AttributedGraph& g) {
  DegreeStats out;
  out.degree.resize(g.n);
  out.same_class_fraction.resize(g.n);
  for (std::uint32_t v = 0; v < g.n; ++v) {
    auto nb = g.neighbors_of(v);
    std::int64_t same = 0;
    for (std::uint32_t u : nb) same += (g.labels[u] == g.labels[v]) ? 1 : 0;
    out.degree[v] = static_cast<std::int64_t>(nb.size());
    out.same_class_fraction[v] = nb.empty() ? 0.0 : static_cast<double>(same) / static_cast<double>(nb.size());
  }
  return out;
}

}  // namespace csbm
