#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "csbm/graph.hpp"

namespace csbm {

/// Bounded propagation nonlinearity: relu(a + c) - relu(a - c) - c.
/// For c > 0 this clamps a to [-c, c]; for c < 0 it equals -phi(a; -c);
/// phi(., 0) is identically zero. Throws on non-finite input.
double phi(double a, double c);

// Unchecked inline form for hot loops; callers guarantee finite inputs.
inline double phi_unchecked(double a, double c) {
  const double r1 = a + c > 0.0 ? a + c : 0.0;
  const double r2 = a - c > 0.0 ? a - c : 0.0;
  return r1 - r2 - c;
}

/// Attribute transform psi = log P_1(x) / P_-1(x) for the supported families,
/// plus the learned parametric form used by the trainer.
class PsiFn {
 public:
  enum class Kind { gaussian, laplace, nef, learned };

  // psi_gau(x) = m [ (mu - nu)^T x - (|mu|^2 - |nu|^2) / 2 ]
  static PsiFn gaussian(std::vector<double> mu, std::vector<double> nu);
  // Exact Laplace log-likelihood ratio, sum_i phi(2 x_i / b; 2 mu_i / b).
  static PsiFn laplace(std::vector<double> mu, double b);
  // psi_nef(x) = (theta_1 - theta_-1)^T x - delta_m
  static PsiFn nef(std::vector<double> theta1, std::vector<double> theta_neg1, double delta_m);
  // Learned form: sum_i w_i phi(x_i; t_i) + bias, or affine w^T x + bias when
  // no clamp thresholds are given. Matches the trainer's parameterization.
  static PsiFn learned(std::vector<double> projection, double bias, std::vector<double> clamp = {});

  static PsiFn from_spec(const AttributeSpec& spec);

  double operator()(std::span<const double> x) const;
  std::size_t dim() const { return weights_.size(); }
  Kind kind() const { return kind_; }

 private:
  PsiFn() = default;
  Kind kind_ = Kind::gaussian;
  std::vector<double> weights_;  // gaussian/nef: affine weights; laplace/learned: per-entry scales
  std::vector<double> clamp_;    // laplace/learned clamp thresholds (absolute values applied)
  double bias_ = 0.0;            // affine offset (gaussian/nef store -constant here)
};

/// Threshold of phi; c = log(p/q), signed (negative under heterophily).
struct PhiFn {
  double c = 0.0;
  static PhiFn from_pq(double p, double q);  // rejects p or q outside (0, 1]
};

struct ModelSpec {
  enum class Kind { nonlinear, linear };
  Kind kind = Kind::nonlinear;
  double c = 0.0;  // nonlinear threshold
  double w = 1.0;  // linear neighbor weight
  static ModelSpec nonlinear(PhiFn f) { return {Kind::nonlinear, f.c, 0.0}; }
  static ModelSpec linear(double w) { return {Kind::linear, 0.0, w}; }
};

/// P_v = psi(X_v) + sum_{u in N_v} phi(psi(X_u); c)
double propagate_nonlinear(const AttributedGraph& g, std::uint32_t v, const PsiFn& psi, double c);

/// P_v^l(w) = psi(X_v) + w * sum_{u in N_v} psi(X_u)
double propagate_linear(const AttributedGraph& g, std::uint32_t v, const PsiFn& psi, double w);

/// sign with the documented tie rule: score 0 classifies as +1.
int classify(double score);

/// Per-node scores for a whole graph from precomputed psi values.
/// `threads <= 1` runs the serial reference path; both paths produce
/// bit-identical output (per-node sums, no cross-node reduction).
std::vector<double> score_all_nonlinear(const AttributedGraph& g, std::span<const double> psi_values, double c,
                                        int threads = 0);
std::vector<double> score_all_linear(const AttributedGraph& g, std::span<const double> psi_values, double w,
                                     int threads = 0);
std::vector<double> psi_all(const AttributedGraph& g, const PsiFn& psi, int threads = 0);

/// Exhaustive MAP over (Y_v, all neighbor labels) of the 1-hop joint
/// potential; the oracle for propagate_nonlinear + classify. At most 20
/// neighbors (2^{k+1} enumeration).
int map_bruteforce(std::span<const double> x_v, const std::vector<std::vector<double>>& neighbor_attrs, double p,
                   double q, const AttributeSpec& spec);

/// Log density of one attribute row under class y, used by the MAP oracle.
double attr_log_density(std::span<const double> x, int y, const AttributeSpec& spec);

}  // namespace csbm
