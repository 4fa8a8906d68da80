#include "csbm/propagation.hpp"

#include <omp.h>

#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace csbm {

double phi(double a, double c) {
  if (!std::isfinite(a) || !std::isfinite(c)) throw std::invalid_argument("phi requires finite inputs");
  return phi_unchecked(a, c);
}

PsiFn PsiFn::gaussian(std::vector<double> mu, std::vector<double> nu) {
  if (mu.empty() || mu.size() != nu.size()) throw std::invalid_argument("psi_gau: mu and nu dimensions differ");
  PsiFn f;
  f.kind_ = Kind::gaussian;
  const double m = static_cast<double>(mu.size());
  f.weights_.resize(mu.size());
  double norm_gap = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    f.weights_[i] = m * (mu[i] - nu[i]);
    norm_gap += mu[i] * mu[i] - nu[i] * nu[i];
  }
  f.bias_ = -m * norm_gap / 2.0;
  return f;
}

PsiFn PsiFn::laplace(std::vector<double> mu, double b) {
  if (mu.empty()) throw std::invalid_argument("psi_lap: empty mu");
  if (!(b > 0.0)) throw std::invalid_argument("psi_lap: b must be > 0");
  PsiFn f;
  f.kind_ = Kind::laplace;
  // sum_i phi(2 x_i / b; 2 mu_i / b) = sum_i (2/b) phi(x_i; mu_i)
  f.weights_.assign(mu.size(), 2.0 / b);
  f.clamp_ = std::move(mu);
  return f;
}

PsiFn PsiFn::nef(std::vector<double> theta1, std::vector<double> theta_neg1, double delta_m) {
  if (theta1.empty() || theta1.size() != theta_neg1.size()) {
    throw std::invalid_argument("psi_nef: theta dimensions differ");
  }
  PsiFn f;
  f.kind_ = Kind::nef;
  f.weights_.resize(theta1.size());
  for (std::size_t i = 0; i < theta1.size(); ++i) f.weights_[i] = theta1[i] - theta_neg1[i];
  f.bias_ = -delta_m;
  return f;
}

PsiFn PsiFn::learned(std::vector<double> projection, double bias, std::vector<double> clamp) {
  if (projection.empty()) throw std::invalid_argument("learned psi: empty projection");
  if (!clamp.empty() && clamp.size() != projection.size()) {
    throw std::invalid_argument("learned psi: clamp dimension mismatch");
  }
  PsiFn f;
  f.kind_ = Kind::learned;
  f.weights_ = std::move(projection);
  f.clamp_ = std::move(clamp);
  f.bias_ = bias;
  return f;
}

PsiFn PsiFn::from_spec(const AttributeSpec& spec) {
  switch (spec.kind) {
    case AttributeSpec::Kind::gaussian:
      return gaussian(spec.mu, spec.nu);
    case AttributeSpec::Kind::laplace:
      return laplace(spec.mu, spec.b);
    case AttributeSpec::Kind::nef:
      return nef(spec.mu, spec.nu, spec.delta_log_partition);
  }
  throw std::logic_error("unreachable");
}

double PsiFn::operator()(std::span<const double> x) const {
  if (x.size() != weights_.size()) throw std::invalid_argument("psi: attribute dimension mismatch");
  double acc = bias_;
  if (clamp_.empty()) {
    for (std::size_t i = 0; i < x.size(); ++i) acc += weights_[i] * x[i];
  } else {
    // Entry-wise clamp-then-project; covers the exact Laplace LLR and the
    // trainer's learned psi.
    for (std::size_t i = 0; i < x.size(); ++i) {
      acc += weights_[i] * phi_unchecked(x[i], clamp_[i]);
    }
  }
  return acc;
}

PhiFn PhiFn::from_pq(double p, double q) {
  if (!(p > 0.0 && p <= 1.0) || !(q > 0.0 && q <= 1.0)) {
    throw std::invalid_argument("phi threshold needs p, q in (0, 1]");
  }
  return PhiFn{std::log(p / q)};
}

double propagate_nonlinear(const AttributedGraph& g, std::uint32_t v, const PsiFn& psi, double c) {
  if (v >= g.n) throw std::out_of_range("node index out of range");
  if (!std::isfinite(c)) throw std::invalid_argument("propagation threshold must be finite");
  double score = psi(g.attr_row(v));
  for (std::uint32_t u : g.neighbors_of(v)) score += phi_unchecked(psi(g.attr_row(u)), c);
  return score;
}

double propagate_linear(const AttributedGraph& g, std::uint32_t v, const PsiFn& psi, double w) {
  if (v >= g.n) throw std::out_of_range("node index out of range");
  double nb = 0.0;
  for (std::uint32_t u : g.neighbors_of(v)) nb += psi(g.attr_row(u));
  return psi(g.attr_row(v)) + w * nb;
}

int classify(double score) {
  if (!std::isfinite(score)) throw std::invalid_argument("classify requires a finite score");
  return score >= 0.0 ? 1 : -1;  // tie at exactly 0 resolves to +1
}

std::vector<double> psi_all(const AttributedGraph& g, const PsiFn& psi, int threads) {
  std::vector<double> values(g.n);
  const std::int64_t n = g.n;
  if (threads <= 1) {
    for (std::int64_t v = 0; v < n; ++v) values[v] = psi(g.attr_row(static_cast<std::uint32_t>(v)));
    return values;
  }
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::int64_t v = 0; v < n; ++v) values[v] = psi(g.attr_row(static_cast<std::uint32_t>(v)));
  return values;
}

std::vector<double> score_all_nonlinear(const AttributedGraph& g, std::span<const double> psi_values, double c,
                                        int threads) {
  if (psi_values.size() != g.n) throw std::invalid_argument("psi value count mismatch");
  std::vector<double> scores(g.n);
  const std::int64_t n = g.n;
  if (threads <= 1) {
    for (std::int64_t v = 0; v < n; ++v) {
      double s = psi_values[v];
      for (std::uint32_t u : g.neighbors_of(static_cast<std::uint32_t>(v))) s += phi_unchecked(psi_values[u], c);
      scores[v] = s;
    }
    return scores;
  }
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::int64_t v = 0; v < n; ++v) {
    double s = psi_values[v];
    for (std::uint32_t u : g.neighbors_of(static_cast<std::uint32_t>(v))) s += phi_unchecked(psi_values[u], c);
    scores[v] = s;
  }
  return scores;
}

std::vector<double> score_all_linear(const AttributedGraph& g, std::span<const double> psi_values, double w,
                                     int threads) {
  if (psi_values.size() != g.n) throw std::invalid_argument("psi value count mismatch");
  std::vector<double> scores(g.n);
  const std::int64_t n = g.n;
  if (threads <= 1) {
    for (std::int64_t v = 0; v < n; ++v) {
      double s = 0.0;
      for (std::uint32_t u : g.neighbors_of(static_cast<std::uint32_t>(v))) s += psi_values[u];
      scores[v] = psi_values[v] + w * s;
    }
    return scores;
  }
#pragma omp parallel for schedule(static) num_threads(threads)
  for (std::int64_t v = 0; v < n; ++v) {
    double s = 0.0;
    for (std::uint32_t u : g.neighbors_of(static_cast<std::uint32_t>(v))) s += psi_values[u];
    scores[v] = psi_values[v] + w * s;
  }
  return scores;
}

double attr_log_density(std::span<const double> x, int y, const AttributeSpec& spec) {
  if (x.size() != spec.dim()) throw std::invalid_argument("attribute dimension mismatch");
  switch (spec.kind) {
    case AttributeSpec::Kind::gaussian: {
      const double m = static_cast<double>(spec.dim());
      const std::vector<double>& mean = y == 1 ? spec.mu : spec.nu;
      double acc = -0.5 * m * std::log(2.0 * std::numbers::pi / m);
      for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - mean[i];
        acc -= 0.5 * m * d * d;
      }
      return acc;
    }
    case AttributeSpec::Kind::laplace: {
      double acc = -static_cast<double>(spec.dim()) * std::log(2.0 * spec.b);
      for (std::size_t i = 0; i < x.size(); ++i) {
        acc -= std::fabs(x[i] - static_cast<double>(y) * spec.mu[i]) / spec.b;
      }
      return acc;
    }
    case AttributeSpec::Kind::nef:
      throw std::invalid_argument("NEF spec has no evaluable density");
  }
  throw std::logic_error("unreachable");
}

int map_bruteforce(std::span<const double> x_v, const std::vector<std::vector<double>>& neighbor_attrs, double p,
                   double q, const AttributeSpec& spec) {
  const std::size_t k = neighbor_attrs.size();
  if (k > 20) throw std::invalid_argument("map_bruteforce: more than 20 neighbors");
  if (!(p > 0.0 && p <= 1.0) || !(q > 0.0 && q <= 1.0)) {
    throw std::invalid_argument("map_bruteforce: p, q must be in (0, 1]");
  }
  const double log_p = std::log(p);
  const double log_q = std::log(q);

  // Per-node class log densities, computed once.
  const double self_ll[2] = {attr_log_density(x_v, -1, spec), attr_log_density(x_v, 1, spec)};
  std::vector<std::array<double, 2>> nb_ll(k);
  for (std::size_t i = 0; i < k; ++i) {
    nb_ll[i] = {attr_log_density(neighbor_attrs[i], -1, spec), attr_log_density(neighbor_attrs[i], 1, spec)};
  }

  double best = -std::numeric_limits<double>::infinity();
  int best_label = 1;
  for (int yv = 1; yv >= -1; yv -= 2) {
    const std::uint64_t combos = std::uint64_t{1} << k;
    for (std::uint64_t mask = 0; mask < combos; ++mask) {
      double ll = self_ll[yv == 1 ? 1 : 0];
      for (std::size_t i = 0; i < k; ++i) {
        const int yu = (mask >> i) & 1u ? 1 : -1;
        ll += nb_ll[i][yu == 1 ? 1 : 0];
        ll += (yu == yv) ? log_p : log_q;
      }
      if (ll > best) {
        best = ll;
        best_label = yv;
      }
    }
  }
  return best_label;
}

}  // namespace csbm
