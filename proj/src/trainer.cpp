#include "csbm/trainer.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <span>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "csbm/propagation.hpp"
#include "csbm/rng.hpp"

namespace csbm {

using nlohmann::json;

namespace {

constexpr std::size_t kGradChunk = 2048;  // fixed blocks keep reductions thread-count invariant

double relu_step(double a) { return a > 0.0 ? 1.0 : 0.0; }  // subgradient 0 at the kink

// d phi(a; c) / da and / dc with the ReLU'(0) = 0 convention.
double dphi_da(double a, double c) { return relu_step(a + c) - relu_step(a - c); }
double dphi_dc(double a, double c) { return relu_step(a + c) + relu_step(a - c) - 1.0; }

double softplus(double x) { return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double logistic(double x) {
  if (x >= 0.0) {
    const double e = std::exp(-x);
    return 1.0 / (1.0 + e);
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double sign_of(double x) { return x > 0.0 ? 1.0 : (x < 0.0 ? -1.0 : 0.0); }

}  // namespace

std::string variant_name(ModelVariant v) {
  switch (v) {
    case ModelVariant::a:
      return "a";
    case ModelVariant::b:
      return "b";
    case ModelVariant::c:
      return "c";
    case ModelVariant::linear:
      return "linear";
  }
  return "?";
}

ModelVariant variant_from_name(const std::string& name) {
  if (name == "a") return ModelVariant::a;
  if (name == "b") return ModelVariant::b;
  if (name == "c") return ModelVariant::c;
  if (name == "linear") return ModelVariant::linear;
  throw std::invalid_argument("unknown model variant: " + name);
}

TrainableModel TrainableModel::init(ModelVariant variant, std::size_t m, std::uint64_t seed) {
  if (m == 0) throw std::invalid_argument("model dimension must be positive");
  TrainableModel model;
  model.variant = variant;
  model.projection.resize(m);
  Rng rng = Rng(seed).stream(RngPurpose::init);
  for (auto& w : model.projection) w = rng.normal();
  model.bias = 0.0;
  if (model.has_psi_clamp()) model.psi_clamp.assign(m, 0.2);
  if (model.has_phi()) model.phi_threshold = 0.2;
  model.neighbor_scale = 1.0;
  return model;
}

double TrainableModel::psi_value(std::span<const double> x) const {
  if (x.size() != projection.size()) throw std::invalid_argument("model/attribute dimension mismatch");
  double acc = bias;
  if (has_psi_clamp()) {
    // Clamp the raw attribute, then project: phi's positive homogeneity makes
    // this cover the exact Laplace LLR (proj = 2/b, clamp = mu), and the
    // projection gradient stays alive on saturated entries.
    for (std::size_t i = 0; i < x.size(); ++i) {
      acc += projection[i] * phi_unchecked(x[i], std::fabs(psi_clamp[i]));
    }
  } else {
    for (std::size_t i = 0; i < x.size(); ++i) acc += projection[i] * x[i];
  }
  return acc;
}

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be > 0");
  if (weight_decay < 0.0) throw std::invalid_argument("weight decay must be >= 0");
}

double forward(const TrainableModel& model, const AttributedGraph& g, std::uint32_t v) {
  if (v >= g.n) throw std::out_of_range("node index out of range");
  if (model.projection.size() != g.m) throw std::invalid_argument("model/graph dimension mismatch");
  double score = model.psi_value(g.attr_row(v));
  if (model.has_phi()) {
    const double t = std::fabs(model.phi_threshold);
    for (std::uint32_t u : g.neighbors_of(v)) score += phi_unchecked(model.psi_value(g.attr_row(u)), t);
  } else {
    double agg = 0.0;
    for (std::uint32_t u : g.neighbors_of(v)) agg += model.psi_value(g.attr_row(u));
    score += model.neighbor_scale * agg;
  }
  return score;
}

namespace {

struct ForwardPass {
  std::vector<double> psi;     // psi(X_u) per node
  std::vector<double> scores;  // full model score per node
};

ForwardPass forward_all(const TrainableModel& model, const AttributedGraph& g, int threads) {
  ForwardPass fp;
  const std::int64_t n = g.n;
  fp.psi.resize(g.n);
  fp.scores.resize(g.n);
#pragma omp parallel for schedule(static) num_threads(std::max(1, threads)) if (threads > 1)
  for (std::int64_t v = 0; v < n; ++v) {
    fp.psi[v] = model.psi_value(g.attr_row(static_cast<std::uint32_t>(v)));
  }
  const bool with_phi = model.has_phi();
  const double t = std::fabs(model.phi_threshold);
  const double s = model.neighbor_scale;
#pragma omp parallel for schedule(static) num_threads(std::max(1, threads)) if (threads > 1)
  for (std::int64_t v = 0; v < n; ++v) {
    double agg = 0.0;
    if (with_phi) {
      for (std::uint32_t u : g.neighbors_of(static_cast<std::uint32_t>(v))) agg += phi_unchecked(fp.psi[u], t);
      fp.scores[v] = fp.psi[v] + agg;
    } else {
      for (std::uint32_t u : g.neighbors_of(static_cast<std::uint32_t>(v))) agg += fp.psi[u];
      fp.scores[v] = fp.psi[v] + s * agg;
    }
  }
  return fp;
}

}  // namespace

LossAndGrads loss_and_grads(const TrainableModel& model, const AttributedGraph& g, double weight_decay,
                            int threads) {
  if (model.projection.size() != g.m) throw std::invalid_argument("model/graph dimension mismatch");
  const std::size_t n = g.n;
  const std::size_t m = g.m;
  const ForwardPass fp = forward_all(model, g, threads);

  // Exceptions must not cross the omp regions below; scan first.
  for (std::size_t v = 0; v < n; ++v) {
    if (!std::isfinite(fp.scores[v])) {
      throw std::runtime_error("non-finite score at node " + std::to_string(v));
    }
  }

  // Per-node logistic gradients; BCE via softplus for stability.
  std::vector<double> node_grad(n);
  const std::size_t n_chunks = (n + kGradChunk - 1) / kGradChunk;
  std::vector<double> loss_chunks(n_chunks, 0.0);
#pragma omp parallel for schedule(static) num_threads(std::max(1, threads)) if (threads > 1)
  for (std::int64_t chunk = 0; chunk < static_cast<std::int64_t>(n_chunks); ++chunk) {
    const std::size_t lo = static_cast<std::size_t>(chunk) * kGradChunk;
    const std::size_t hi = std::min(n, lo + kGradChunk);
    double acc = 0.0;
    for (std::size_t v = lo; v < hi; ++v) {
      const double score = fp.scores[v];
      const double y01 = g.labels[v] == 1 ? 1.0 : 0.0;
      acc += softplus(score) - y01 * score;
      node_grad[v] = logistic(score) - y01;
    }
    loss_chunks[static_cast<std::size_t>(chunk)] = acc;
  }
  double loss = 0.0;
  for (double x : loss_chunks) loss += x;
  loss /= static_cast<double>(n);

  // gsum[u] = sum of node gradients over u's neighbors.
  std::vector<double> gsum(n);
#pragma omp parallel for schedule(static) num_threads(std::max(1, threads)) if (threads > 1)
  for (std::int64_t u = 0; u < static_cast<std::int64_t>(n); ++u) {
    double acc = 0.0;
    for (std::uint32_t v : g.neighbors_of(static_cast<std::uint32_t>(u))) acc += node_grad[v];
    gsum[u] = acc;
  }

  const bool clamped_psi = model.has_psi_clamp();
  const bool with_phi = model.has_phi();
  const double t = std::fabs(model.phi_threshold);
  const double s = model.neighbor_scale;

  // Chain coefficient A_u for d psi_u, plus direct t / s gradient pieces,
  // accumulated per fixed chunk and combined in chunk order.
  std::vector<std::vector<double>> proj_chunks(n_chunks, std::vector<double>(m, 0.0));
  std::vector<std::vector<double>> clamp_chunks(clamped_psi ? n_chunks : 0, std::vector<double>(m, 0.0));
  std::vector<double> bias_chunks(n_chunks, 0.0), t_chunks(n_chunks, 0.0), s_chunks(n_chunks, 0.0);

#pragma omp parallel for schedule(static) num_threads(std::max(1, threads)) if (threads > 1)
  for (std::int64_t chunk = 0; chunk < static_cast<std::int64_t>(n_chunks); ++chunk) {
    const std::size_t lo = static_cast<std::size_t>(chunk) * kGradChunk;
    const std::size_t hi = std::min(n, lo + kGradChunk);
    auto& proj_acc = proj_chunks[static_cast<std::size_t>(chunk)];
    double bias_acc = 0.0, t_acc = 0.0, s_acc = 0.0;
    for (std::size_t u = lo; u < hi; ++u) {
      const double a_u = with_phi ? node_grad[u] + dphi_da(fp.psi[u], t) * gsum[u]  //
                                  : node_grad[u] + s * gsum[u];
      const double* x = g.attrs.data() + u * m;
      if (clamped_psi) {
        auto& clamp_acc = clamp_chunks[static_cast<std::size_t>(chunk)];
        for (std::size_t i = 0; i < m; ++i) {
          const double ci = std::fabs(model.psi_clamp[i]);
          proj_acc[i] += a_u * phi_unchecked(x[i], ci);
          clamp_acc[i] += a_u * model.projection[i] * dphi_dc(x[i], ci) * sign_of(model.psi_clamp[i]);
        }
      } else {
        for (std::size_t i = 0; i < m; ++i) proj_acc[i] += a_u * x[i];
      }
      bias_acc += a_u;
      if (with_phi) t_acc += dphi_dc(fp.psi[u], t) * gsum[u];
      else s_acc += fp.psi[u] * gsum[u];
    }
    bias_chunks[static_cast<std::size_t>(chunk)] = bias_acc;
    t_chunks[static_cast<std::size_t>(chunk)] = t_acc;
    s_chunks[static_cast<std::size_t>(chunk)] = s_acc;
  }

  LossAndGrads out;
  out.loss = loss;
  out.grads.projection.assign(m, 0.0);
  if (clamped_psi) out.grads.psi_clamp.assign(m, 0.0);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t chunk = 0; chunk < n_chunks; ++chunk) {
    for (std::size_t i = 0; i < m; ++i) out.grads.projection[i] += proj_chunks[chunk][i];
    if (clamped_psi) {
      for (std::size_t i = 0; i < m; ++i) out.grads.psi_clamp[i] += clamp_chunks[chunk][i];
    }
    out.grads.bias += bias_chunks[chunk];
    out.grads.phi_threshold += t_chunks[chunk];
    out.grads.neighbor_scale += s_chunks[chunk];
  }
  for (std::size_t i = 0; i < m; ++i) out.grads.projection[i] *= inv_n;
  if (clamped_psi) {
    for (std::size_t i = 0; i < m; ++i) out.grads.psi_clamp[i] *= inv_n;
  }
  out.grads.bias *= inv_n;
  out.grads.phi_threshold *= with_phi ? inv_n * sign_of(model.phi_threshold) : 0.0;
  out.grads.neighbor_scale *= model.has_neighbor_scale() ? inv_n : 0.0;

  if (weight_decay > 0.0) {
    for (std::size_t i = 0; i < m; ++i) out.grads.projection[i] += weight_decay * model.projection[i];
    out.grads.bias += weight_decay * model.bias;
    if (clamped_psi) {
      for (std::size_t i = 0; i < m; ++i) out.grads.psi_clamp[i] += weight_decay * model.psi_clamp[i];
    }
    if (with_phi) out.grads.phi_threshold += weight_decay * model.phi_threshold;
    if (model.has_neighbor_scale()) out.grads.neighbor_scale += weight_decay * model.neighbor_scale;
  }
  return out;
}

namespace {

// Adam over the flattened trainable parameters.
class AdamState {
 public:
  explicit AdamState(std::size_t size) : m_(size, 0.0), v_(size, 0.0) {}

  void step(std::vector<double>& params, const std::vector<double>& grads, double lr) {
    ++t_;
    const double bc1 = 1.0 - std::pow(kBeta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(kBeta2, static_cast<double>(t_));
    for (std::size_t i = 0; i < params.size(); ++i) {
      m_[i] = kBeta1 * m_[i] + (1.0 - kBeta1) * grads[i];
      v_[i] = kBeta2 * v_[i] + (1.0 - kBeta2) * grads[i] * grads[i];
      const double mhat = m_[i] / bc1;
      const double vhat = v_[i] / bc2;
      params[i] -= lr * mhat / (std::sqrt(vhat) + kEps);
    }
  }

 private:
  static constexpr double kBeta1 = 0.9;
  static constexpr double kBeta2 = 0.999;
  static constexpr double kEps = 1e-8;
  std::vector<double> m_, v_;
  std::uint64_t t_ = 0;
};

std::vector<double> pack_params(const TrainableModel& model) {
  std::vector<double> out(model.projection.begin(), model.projection.end());
  out.push_back(model.bias);
  out.insert(out.end(), model.psi_clamp.begin(), model.psi_clamp.end());
  if (model.has_phi()) out.push_back(model.phi_threshold);
  if (model.has_neighbor_scale()) out.push_back(model.neighbor_scale);
  return out;
}

std::vector<double> pack_grads(const TrainableModel& model, const Gradients& g) {
  const auto& mask = model.trainable;
  std::vector<double> out;
  for (double x : g.projection) out.push_back(mask.projection ? x : 0.0);
  out.push_back(mask.bias ? g.bias : 0.0);
  for (double x : g.psi_clamp) out.push_back(mask.psi_clamp ? x : 0.0);
  if (model.has_phi()) out.push_back(mask.phi_threshold ? g.phi_threshold : 0.0);
  if (model.has_neighbor_scale()) out.push_back(mask.neighbor_scale ? g.neighbor_scale : 0.0);
  return out;
}

void unpack_params(TrainableModel& model, const std::vector<double>& packed) {
  std::size_t k = 0;
  for (auto& w : model.projection) w = packed[k++];
  model.bias = packed[k++];
  for (auto& c : model.psi_clamp) c = packed[k++];
  if (model.has_phi()) model.phi_threshold = packed[k++];
  if (model.has_neighbor_scale()) model.neighbor_scale = packed[k++];
}

}  // namespace

TrainResult train(TrainableModel model, const AttributedGraph& g, const TrainConfig& config, int threads) {
  config.validate();
  TrainResult result;
  result.loss_trace.reserve(config.epochs);
  auto packed = pack_params(model);
  AdamState adam(packed.size());
  for (std::uint64_t epoch = 0; epoch < config.epochs; ++epoch) {
    LossAndGrads lg;
    try {
      lg = loss_and_grads(model, g, config.weight_decay, threads);
    } catch (const std::runtime_error& e) {
      result.diverged = true;
      result.note = std::string("aborted at epoch ") + std::to_string(epoch) + ": " + e.what();
      break;
    }
    if (!std::isfinite(lg.loss)) {
      result.diverged = true;
      result.note = "aborted at epoch " + std::to_string(epoch) + ": non-finite loss";
      break;
    }
    result.loss_trace.push_back(lg.loss);
    adam.step(packed, pack_grads(model, lg.grads), config.learning_rate);
    unpack_params(model, packed);
  }
  result.model = std::move(model);
  return result;
}

double evaluate(const TrainableModel& model, const AttributedGraph& g, int threads) {
  const ForwardPass fp = forward_all(model, g, threads);
  std::int64_t correct = 0;
  for (std::uint32_t v = 0; v < g.n; ++v) {
    const int pred = fp.scores[v] >= 0.0 ? 1 : -1;
    correct += pred == g.labels[v] ? 1 : 0;
  }
  return static_cast<double>(correct) / static_cast<double>(g.n);
}

void save_checkpoint(const TrainableModel& model, const TrainConfig& config, const std::string& path) {
  json j;
  j["variant"] = variant_name(model.variant);
  j["projection"] = model.projection;
  j["bias"] = model.bias;
  j["psi_clamp"] = model.psi_clamp;
  j["phi_threshold"] = model.phi_threshold;
  j["neighbor_scale"] = model.neighbor_scale;
  j["config"] = {{"learning_rate", config.learning_rate},
                 {"weight_decay", config.weight_decay},
                 {"epochs", config.epochs},
                 {"seed", config.seed}};
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << j.dump(2) << "\n";
}

TrainableModel load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  json j;
  in >> j;
  TrainableModel model;
  model.variant = variant_from_name(j.at("variant").get<std::string>());
  model.projection = j.at("projection").get<std::vector<double>>();
  model.bias = j.at("bias").get<double>();
  model.psi_clamp = j.at("psi_clamp").get<std::vector<double>>();
  model.phi_threshold = j.at("phi_threshold").get<double>();
  model.neighbor_scale = j.at("neighbor_scale").get<double>();
  return model;
}

}  // namespace csbm
