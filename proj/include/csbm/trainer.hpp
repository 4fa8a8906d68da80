#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "csbm/graph.hpp"

namespace csbm {

/// Trainable score models from the real-data protocol:
///   a      clamped psi + phi propagation (full nonlinear)
///   b      clamped psi + linear propagation
///   c      affine psi + phi propagation
///   linear affine psi + linear propagation
/// psi_clamped(x) = sum_i phi(proj_i x_i; |tau_i|) + bias
/// psi_affine(x)  = proj^T x + bias
/// phi propagation adds sum_u phi(psi(X_u); |t|); linear propagation adds
/// neighbor_scale * sum_u psi(X_u). Thresholds are stored unconstrained and
/// used through absolute value; gradients flow through sign.
enum class ModelVariant { a, b, c, linear };

std::string variant_name(ModelVariant v);
ModelVariant variant_from_name(const std::string& name);

struct TrainableModel {
  ModelVariant variant = ModelVariant::linear;
  std::vector<double> projection;
  double bias = 0.0;
  std::vector<double> psi_clamp;  // variants a, b
  double phi_threshold = 0.0;     // variants a, c
  double neighbor_scale = 1.0;    // variants b, linear

  struct Mask {
    bool projection = true;
    bool bias = true;
    bool psi_clamp = true;
    bool phi_threshold = true;
    bool neighbor_scale = true;
  } trainable;

  bool has_psi_clamp() const { return variant == ModelVariant::a || variant == ModelVariant::b; }
  bool has_phi() const { return variant == ModelVariant::a || variant == ModelVariant::c; }
  bool has_neighbor_scale() const { return !has_phi(); }

  // Projection ~ N(0,1) entries, clamp and phi thresholds 0.2, bias 0,
  // neighbor scale 1; seeded and deterministic.
  static TrainableModel init(ModelVariant variant, std::size_t m, std::uint64_t seed);

  double psi_value(std::span<const double> x) const;
};

struct TrainConfig {
  double learning_rate = 1e-2;
  double weight_decay = 5e-4;
  std::uint64_t epochs = 500;
  std::uint64_t seed = 0;

  void validate() const;
};

struct Gradients {
  std::vector<double> projection;
  double bias = 0.0;
  std::vector<double> psi_clamp;
  double phi_threshold = 0.0;
  double neighbor_scale = 0.0;
};

double forward(const TrainableModel& model, const AttributedGraph& g, std::uint32_t v);

/// Mean binary cross-entropy of logistic(score) against (y + 1) / 2 plus L2
/// weight decay, with analytic gradients. ReLU subgradient at kinks is 0.
/// Non-finite scores raise with the offending node id.
struct LossAndGrads {
  double loss = 0.0;
  Gradients grads;
};
LossAndGrads loss_and_grads(const TrainableModel& model, const AttributedGraph& g, double weight_decay,
                            int threads = 0);

struct TrainResult {
  TrainableModel model;
  std::vector<double> loss_trace;  // one entry per epoch (loss before the update)
  bool diverged = false;
  std::string note;
};

/// Full-batch adaptive-moment updates (beta1 0.9, beta2 0.999, eps 1e-8),
/// `epochs` steps; deterministic given config.seed and thread count.
TrainResult train(TrainableModel model, const AttributedGraph& g, const TrainConfig& config, int threads = 0);

/// Sign-rule accuracy on a labeled graph.
double evaluate(const TrainableModel& model, const AttributedGraph& g, int threads = 0);

void save_checkpoint(const TrainableModel& model, const TrainConfig& config, const std::string& path);
TrainableModel load_checkpoint(const std::string& path);

}  // namespace csbm
