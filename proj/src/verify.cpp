#include "csbm/verify.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "csbm/io.hpp"
#include "csbm/propagation.hpp"
#include "csbm/rng.hpp"
#include "csbm/sampler.hpp"
#include "csbm/theory.hpp"
#include "csbm/trainer.hpp"

namespace csbm {

namespace {

struct CheckResult {
  bool passed = true;
  std::ostringstream out;

  void fail(const std::string& why) {
    passed = false;
    out << "  FAIL: " << why << "\n";
  }
};

std::vector<double> random_vec(Rng& rng, std::size_t m, double scale = 1.0) {
  std::vector<double> v(m);
  for (auto& x : v) x = scale * rng.normal();
  return v;
}

CheckResult check_map(std::uint64_t seed, bool inject_sign_flip) {
  CheckResult res;
  const auto spec = AttributeSpec::gaussian_symmetric(1.2, 3);
  const auto psi = PsiFn::from_spec(spec);
  const double pqs[][2] = {{0.3, 0.2}, {0.6, 0.2}, {0.2, 0.4}};  // ratios 1.5, 3, 0.5
  Rng rng(mix_seed(seed, 0x6d6170ULL));
  int checked = 0, mismatches = 0;
  for (int i = 0; i < 200; ++i) {
    const auto& pq = pqs[i % 3];
    const double c = std::log(pq[0] / pq[1]);
    const std::size_t k = rng.below(9);
    const auto x = random_vec(rng, 3);
    std::vector<std::vector<double>> nbs;
    for (std::size_t t = 0; t < k; ++t) nbs.push_back(random_vec(rng, 3));
    double score = psi(x);
    for (const auto& nb : nbs) {
      const double message = phi_unchecked(psi(nb), c);
      score += inject_sign_flip ? -message : message;
    }
    if (std::fabs(score) <= 1e-9) continue;
    ++checked;
    if (map_bruteforce(x, nbs, pq[0], pq[1], spec) != classify(score)) ++mismatches;
  }
  res.out << "  " << checked << " decided star instances, " << mismatches << " MAP disagreements\n";
  if (mismatches != 0) res.fail("propagation disagrees with brute-force MAP");
  if (checked < 150) res.fail("too few decided instances");
  return res;
}

CheckResult check_moments(int threads) {
  CheckResult res;
  res.out << "  mu2,p_over_q,mean_closed,mean_mc,var_closed,var_mc,mean_rel_err,var_rel_err\n";
  const double mu2s[] = {0.01, 0.1, 1.0, 4.0};
  const double ratios[] = {1.1, 2.0, 5.0};
  // Pinned MC stream: at the smallest grid point the 2% tolerance is about
  // two standard errors of the 1e6-sample estimate, so the stream is part of
  // the check's test vector rather than derived from the user seed.
  const std::uint64_t moment_seed = 20240624;
  for (double mu2 : mu2s) {
    for (double ratio : ratios) {
      const double q = 0.1, p = q * ratio;
      const auto cf = moments_closed_form(1, mu2, p, q);
      const auto mc = moments_monte_carlo(1, mu2, p, q, 1000000, mix_seed(moment_seed, static_cast<std::uint64_t>(mu2 * 1000 + ratio * 10)), threads);
      const double mean_err = std::fabs(cf.mean) > 1e-3 ? std::fabs(mc.mean - cf.mean) / std::fabs(cf.mean) : 0.0;
      const double var_err = std::fabs(mc.variance - cf.variance) / cf.variance;
      res.out << "  " << format_double(mu2) << ',' << format_double(ratio) << ',' << format_double(cf.mean) << ','
              << format_double(mc.mean) << ',' << format_double(cf.variance) << ',' << format_double(mc.variance)
              << ',' << format_double(mean_err) << ',' << format_double(var_err) << "\n";
      if (mean_err > 0.02) res.fail("mean relative error above 2%");
      if (var_err > 0.05) res.fail("variance relative error above 5%");
    }
  }
  return res;
}

CheckResult check_gradients(std::uint64_t seed, int threads) {
  CheckResult res;
  const ModelVariant variants[] = {ModelVariant::a, ModelVariant::b, ModelVariant::c, ModelVariant::linear};
  Rng seeder(mix_seed(seed, 0x67726164ULL));
  int tested = 0;
  double worst = 0.0;
  for (int attempt = 0; attempt < 60 && tested < 8; ++attempt) {
    CsbmParams params;
    params.n = 120;
    params.p = 0.08;
    params.q = 0.02;
    params.attr = AttributeSpec::laplace_symmetric(1.0, 1.0, 4);
    params.seed = seeder.next_u64();
    const auto g = sample_csbm(params);
    TrainableModel model = TrainableModel::init(variants[attempt % 4], 4, seeder.next_u64());
    Rng r(seeder.next_u64());
    for (auto& w : model.projection) w = 1.5 * r.normal();
    model.bias = 0.5 * r.normal();
    for (auto& c : model.psi_clamp) c = 0.5 + r.uniform01();
    if (model.has_phi()) model.phi_threshold = 0.3 + r.uniform01();
    if (model.has_neighbor_scale()) model.neighbor_scale = 0.5 + r.uniform01();

    // skip configurations with pre-activations near a ReLU corner
    bool near_kink = false;
    const double t = std::fabs(model.phi_threshold);
    for (std::uint32_t v = 0; v < g.n && !near_kink; ++v) {
      const double pv = model.psi_value(g.attr_row(v));
      if (model.has_phi() && std::fabs(std::fabs(pv) - t) < 1e-3) near_kink = true;
      if (model.has_psi_clamp()) {
        auto x = g.attr_row(v);
        for (std::size_t i = 0; i < x.size(); ++i) {
          if (std::fabs(std::fabs(x[i]) - std::fabs(model.psi_clamp[i])) < 1e-3) near_kink = true;
        }
      }
    }
    if (near_kink) continue;
    ++tested;

    const auto analytic = loss_and_grads(model, g, 0.0, threads).grads;
    const double h = 1e-5;
    auto fd = [&](auto&& nudge) {
      TrainableModel up = model, down = model;
      nudge(up, h);
      nudge(down, -h);
      return (loss_and_grads(up, g, 0.0, threads).loss - loss_and_grads(down, g, 0.0, threads).loss) / (2 * h);
    };
    auto record = [&](double a, double n_) {
      const double scale = std::max({std::fabs(a), std::fabs(n_), 1e-6});
      worst = std::max(worst, std::fabs(a - n_) / scale);
    };
    for (std::size_t i = 0; i < model.projection.size(); ++i) {
      record(analytic.projection[i], fd([i](TrainableModel& m, double d) { m.projection[i] += d; }));
    }
    record(analytic.bias, fd([](TrainableModel& m, double d) { m.bias += d; }));
    for (std::size_t i = 0; i < model.psi_clamp.size(); ++i) {
      record(analytic.psi_clamp[i], fd([i](TrainableModel& m, double d) { m.psi_clamp[i] += d; }));
    }
    if (model.has_phi()) {
      record(analytic.phi_threshold, fd([](TrainableModel& m, double d) { m.phi_threshold += d; }));
    }
    if (model.has_neighbor_scale()) {
      record(analytic.neighbor_scale, fd([](TrainableModel& m, double d) { m.neighbor_scale += d; }));
    }
  }
  res.out << "  " << tested << " configurations, worst relative gradient error " << format_double(worst) << "\n";
  if (tested < 8) res.fail("too few kink-free configurations");
  if (worst > 1e-4) res.fail("gradient mismatch above 1e-4 relative");
  return res;
}

CheckResult check_phi(std::uint64_t seed) {
  CheckResult res;
  Rng rng(mix_seed(seed, 0x706869ULL));
  int failures = 0;
  for (int i = 0; i < 10000; ++i) {
    const double a = 10.0 * (rng.uniform01() - 0.5);
    const double c = 4.0 * (rng.uniform01() - 0.5);
    if (std::fabs(phi_unchecked(a, c)) > std::fabs(c) + 1e-12) ++failures;
    if (std::fabs(phi_unchecked(a, c) + phi_unchecked(a, -c)) > 1e-12) ++failures;
    if (phi_unchecked(a, 0.0) != 0.0) ++failures;
    const double a2 = a + rng.uniform01();
    if (c > 0.0 && phi_unchecked(a2, c) < phi_unchecked(a, c) - 1e-12) ++failures;
    if (c < 0.0 && phi_unchecked(a2, c) > phi_unchecked(a, c) + 1e-12) ++failures;
  }
  for (int i = 0; i < 10000; ++i) {
    const std::size_t m = 1 + rng.below(5);
    const auto mu = random_vec(rng, m, 2.0);
    const double b = 0.1 + 3.0 * rng.uniform01();
    const auto x = random_vec(rng, m, 4.0);
    const auto spec = AttributeSpec::laplace(mu, b);
    const double exact = attr_log_density(x, 1, spec) - attr_log_density(x, -1, spec);
    if (std::fabs(PsiFn::laplace(mu, b)(x) - exact) > 1e-12 * std::max(1.0, std::fabs(exact))) ++failures;
  }
  for (int i = 0; i < 10000; ++i) {
    const std::size_t m = 1 + rng.below(6);
    const auto mu = random_vec(rng, m);
    const auto nu = random_vec(rng, m);
    std::vector<double> t1(m), t2(m);
    double norm_gap = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      t1[k] = static_cast<double>(m) * mu[k];
      t2[k] = static_cast<double>(m) * nu[k];
      norm_gap += mu[k] * mu[k] - nu[k] * nu[k];
    }
    const auto x = random_vec(rng, m, 3.0);
    const double nef = PsiFn::nef(t1, t2, static_cast<double>(m) * norm_gap / 2.0)(x);
    const double gau = PsiFn::gaussian(mu, nu)(x);
    if (std::fabs(nef - gau) > 1e-12 * std::max(1.0, std::fabs(gau))) ++failures;
  }
  res.out << "  30000 randomized property cases, " << failures << " failures\n";
  if (failures != 0) res.fail("phi/psi property violated");
  return res;
}

}  // namespace

VerifyReport run_verification(const std::vector<std::string>& checks, std::uint64_t seed, int threads,
                              bool inject_phi_sign_flip) {
  auto wants = [&](const std::string& name) {
    return checks.empty() || std::find(checks.begin(), checks.end(), name) != checks.end();
  };
  VerifyReport report;
  report.all_passed = true;
  std::ostringstream out;
  auto emit = [&](const std::string& name, const CheckResult& r) {
    out << "check " << name << ": " << (r.passed ? "PASS" : "FAIL") << "\n" << r.out.str();
    report.all_passed = report.all_passed && r.passed;
  };
  if (wants("map")) emit("map", check_map(seed, inject_phi_sign_flip));
  if (wants("moments")) emit("moments", check_moments(threads));
  if (wants("gradients")) emit("gradients", check_gradients(seed, threads));
  if (wants("phi")) emit("phi", check_phi(seed));
  out << (report.all_passed ? "verification: all checks passed\n" : "verification: FAILURES present\n");
  report.text = out.str();
  return report;
}

}  // namespace csbm
