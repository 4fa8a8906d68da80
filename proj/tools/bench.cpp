// Timing comparison of the OpenMP kernels against their serial reference
// paths: whole-graph scoring, Monte Carlo message moments, and one trainer
// epoch. The two paths produce bit-identical results (verified in the unit
// suite); this target reports wall-clock and speedup only.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>

#include "csbm/propagation.hpp"
#include "csbm/sampler.hpp"
#include "csbm/theory.hpp"
#include "csbm/trainer.hpp"

using namespace csbm;

namespace {

double time_of(const std::function<void()>& fn, int repeats = 3) {
  double best = 1e100;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (dt < best) best = dt;
  }
  return best;
}

void report(const char* name, double serial, double parallel) {
  std::printf("%-28s serial %8.3f ms   omp %8.3f ms   speedup %.2fx\n", name, serial * 1e3, parallel * 1e3,
              serial / parallel);
}

}  // namespace

int main() {
  const int threads = omp_get_max_threads();
  std::printf("omp max threads: %d\n", threads);

  CsbmParams params;
  params.n = 50000;
  params.p = 0.004;
  params.q = 0.002;
  params.attr = AttributeSpec::gaussian_symmetric(0.5, 10);
  params.seed = 1;
  const auto g = sample_csbm(params);
  const auto psi = PsiFn::from_spec(params.attr);
  std::printf("graph: n=%u edges=%lld\n", g.n, static_cast<long long>(g.num_edges()));

  const auto values = psi_all(g, psi, 1);
  report("psi_all",  //
         time_of([&] { (void)psi_all(g, psi, 1); }), time_of([&] { (void)psi_all(g, psi, threads); }));
  report("score_all_nonlinear",  //
         time_of([&] { (void)score_all_nonlinear(g, values, 0.7, 1); }),
         time_of([&] { (void)score_all_nonlinear(g, values, 0.7, threads); }));
  report("score_all_linear",  //
         time_of([&] { (void)score_all_linear(g, values, 1.0, 1); }),
         time_of([&] { (void)score_all_linear(g, values, 1.0, threads); }));
  report("moments_monte_carlo(2e6)",  //
         time_of([&] { (void)moments_monte_carlo(10, 0.1, 0.04, 0.02, 2000000, 7, 1); }),
         time_of([&] { (void)moments_monte_carlo(10, 0.1, 0.04, 0.02, 2000000, 7, threads); }));

  const auto model = TrainableModel::init(ModelVariant::a, 10, 3);
  report("loss_and_grads",  //
         time_of([&] { (void)loss_and_grads(model, g, 5e-4, 1); }),
         time_of([&] { (void)loss_and_grads(model, g, 5e-4, threads); }));
  return 0;
}
