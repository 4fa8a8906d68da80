#include <cmath>
#include <stdexcept>
#include <numbers>
#include <vector>

#include "csbm/graph.hpp"
#include "csbm/propagation.hpp"
#include "csbm/rng.hpp"
#include "csbm/sampler.hpp"
#include "doctest.h"

using namespace csbm;

namespace {

const double kLn2 = std::numbers::ln2;

AttributedGraph star_graph(const std::vector<double>& center, const std::vector<std::vector<double>>& leaves,
                           std::int8_t center_label = 1) {
  const std::uint32_t m = static_cast<std::uint32_t>(center.size());
  const std::uint32_t n = static_cast<std::uint32_t>(leaves.size()) + 1;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  std::vector<double> attrs(center.begin(), center.end());
  std::vector<std::int8_t> labels(n, 1);
  labels[0] = center_label;
  for (std::uint32_t i = 0; i < leaves.size(); ++i) {
    edges.emplace_back(0, i + 1);
    attrs.insert(attrs.end(), leaves[i].begin(), leaves[i].end());
  }
  return AttributedGraph::from_edge_list(n, m, edges, std::move(labels), std::move(attrs));
}

std::vector<double> random_vec(Rng& rng, std::size_t m, double scale = 1.0) {
  std::vector<double> v(m);
  for (auto& x : v) x = scale * rng.normal();
  return v;
}

}  // namespace

TEST_CASE("phi point values") {
  CHECK(phi(0.5, kLn2) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(phi(5.0, kLn2) == doctest::Approx(kLn2).epsilon(1e-12));
  CHECK(phi(1.0, 0.0) == 0.0);
  CHECK(phi(2.0, -kLn2) == doctest::Approx(-kLn2).epsilon(1e-12));
  CHECK_THROWS_AS(phi(std::numeric_limits<double>::infinity(), 1.0), std::invalid_argument);
  CHECK_THROWS_AS(phi(0.0, std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
}

TEST_CASE("phi properties on 1e4 random cases") {
  Rng rng(404);
  for (int i = 0; i < 10000; ++i) {
    const double a = 10.0 * (rng.uniform01() - 0.5);
    const double c = 4.0 * (rng.uniform01() - 0.5);
    CAPTURE(a);
    CAPTURE(c);
    CHECK(std::fabs(phi(a, c)) <= std::fabs(c) + 1e-15);
    CHECK(phi(a, c) == doctest::Approx(-phi(a, -c)).epsilon(1e-12));
    CHECK(phi(-a, c) == doctest::Approx(-phi(a, c)).epsilon(1e-12));
    CHECK(phi(a, 0.0) == 0.0);
    // monotone: non-decreasing in a for c > 0, non-increasing for c < 0
    const double a2 = a + rng.uniform01();
    if (c > 0.0) {
      CHECK(phi(a2, c) >= phi(a, c) - 1e-12);
    } else if (c < 0.0) {
      CHECK(phi(a2, c) <= phi(a, c) + 1e-12);
    }
  }
}

TEST_CASE("psi_gau point values") {
  auto f = PsiFn::gaussian({1.0, 0.0}, {-1.0, 0.0});
  const std::vector<double> x{0.3, 7.0};
  CHECK(f(x) == doctest::Approx(1.2).epsilon(1e-12));

  auto g = PsiFn::gaussian({0.5, 0.5}, {-0.5, -0.5});
  const std::vector<double> at_mu{0.5, 0.5};
  CHECK(g(at_mu) == doctest::Approx(2.0).epsilon(1e-12));

  Rng rng(7);
  for (int i = 0; i < 20; ++i) {
    auto mu = random_vec(rng, 3);
    auto nu = random_vec(rng, 3);
    auto h = PsiFn::gaussian(mu, nu);
    std::vector<double> mid(3);
    for (int k = 0; k < 3; ++k) mid[k] = 0.5 * (mu[k] + nu[k]);
    CHECK(h(mid) == doctest::Approx(0.0).epsilon(1e-10));
  }
}

TEST_CASE("psi_lap equals the exact Laplace log-likelihood ratio") {
  auto f = PsiFn::laplace({1.0}, 1.0);
  CHECK(f(std::vector<double>{0.5}) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(f(std::vector<double>{10.0}) == doctest::Approx(2.0).epsilon(1e-12));

  Rng rng(555);
  for (int i = 0; i < 2000; ++i) {
    const std::size_t m = 1 + rng.below(5);
    auto mu = random_vec(rng, m, 2.0);
    const double b = 0.1 + 3.0 * rng.uniform01();
    auto x = random_vec(rng, m, 4.0);
    auto spec = AttributeSpec::laplace(mu, b);
    const double expected = attr_log_density(x, 1, spec) - attr_log_density(x, -1, spec);
    CHECK(PsiFn::laplace(mu, b)(x) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("psi_nef") {
  auto zero = PsiFn::nef({1.0, 2.0}, {1.0, 2.0}, 0.0);
  Rng rng(8);
  for (int i = 0; i < 10; ++i) {
    CHECK(zero(random_vec(rng, 2)) == 0.0);
  }

  auto f = PsiFn::nef({1.5, 1.0}, {0.5, 0.0}, 0.5);
  const std::vector<double> x{1.0, 0.0};
  CHECK(f(x) == doctest::Approx(0.5).epsilon(1e-12));

  // Gaussian instantiation theta_Y = m mu_Y, delta_m = m(|mu|^2 - |nu|^2)/2
  for (int i = 0; i < 200; ++i) {
    const std::size_t m = 1 + rng.below(6);
    auto mu = random_vec(rng, m);
    auto nu = random_vec(rng, m);
    std::vector<double> t1(m), t2(m);
    double norm_gap = 0.0;
    for (std::size_t k = 0; k < m; ++k) {
      t1[k] = static_cast<double>(m) * mu[k];
      t2[k] = static_cast<double>(m) * nu[k];
      norm_gap += mu[k] * mu[k] - nu[k] * nu[k];
    }
    auto nef = PsiFn::nef(t1, t2, static_cast<double>(m) * norm_gap / 2.0);
    auto gau = PsiFn::gaussian(mu, nu);
    auto x2 = random_vec(rng, m, 3.0);
    CHECK(nef(x2) == doctest::Approx(gau(x2)).epsilon(1e-12));
  }
}

TEST_CASE("propagate_nonlinear") {
  auto psi = PsiFn::gaussian({0.6, -0.2}, {-0.6, 0.2});
  SUBCASE("isolated node returns psi") {
    auto g = AttributedGraph::from_edge_list(1, 2, {}, {1}, {0.4, 0.9});
    CHECK(propagate_nonlinear(g, 0, psi, kLn2) == doctest::Approx(psi(g.attr_row(0))).epsilon(1e-12));
  }
  SUBCASE("p = q deactivates the propagation") {
    Rng rng(21);
    std::vector<std::vector<double>> leaves;
    for (int i = 0; i < 6; ++i) leaves.push_back(random_vec(rng, 2));
    auto g = star_graph(random_vec(rng, 2), leaves);
    CHECK(propagate_nonlinear(g, 0, psi, 0.0) == doctest::Approx(psi(g.attr_row(0))).epsilon(1e-12));
  }
  SUBCASE("star graph matches the term-by-term sum") {
    Rng rng(22);
    std::vector<std::vector<double>> leaves;
    for (int i = 0; i < 5; ++i) leaves.push_back(random_vec(rng, 2));
    auto g = star_graph(random_vec(rng, 2), leaves);
    const double c = std::log(0.03 / 0.01);
    double expected = psi(g.attr_row(0));
    for (std::uint32_t u = 1; u <= 5; ++u) expected += phi(psi(g.attr_row(u)), c);
    CHECK(propagate_nonlinear(g, 0, psi, c) == doctest::Approx(expected).epsilon(1e-12));
  }
  SUBCASE("invalid node index") {
    auto g = AttributedGraph::from_edge_list(1, 2, {}, {1}, {0.0, 0.0});
    CHECK_THROWS_AS(propagate_nonlinear(g, 5, psi, 0.1), std::out_of_range);
  }
}

TEST_CASE("propagate_linear") {
  auto psi = PsiFn::gaussian({0.6, -0.2}, {-0.6, 0.2});
  Rng rng(23);
  std::vector<std::vector<double>> leaves;
  for (int i = 0; i < 4; ++i) leaves.push_back(random_vec(rng, 2));
  auto g = star_graph(random_vec(rng, 2), leaves);
  const double self = psi(g.attr_row(0));
  CHECK(propagate_linear(g, 0, psi, 0.0) == doctest::Approx(self).epsilon(1e-12));
  const double plus = propagate_linear(g, 0, psi, 1.0);
  const double minus = propagate_linear(g, 0, psi, -1.0);
  CHECK(plus - self == doctest::Approx(-(minus - self)).epsilon(1e-12));

  auto isolated = AttributedGraph::from_edge_list(1, 2, {}, {1}, {0.3, -0.1});
  CHECK(propagate_linear(isolated, 0, psi, 5.0) == doctest::Approx(psi(isolated.attr_row(0))).epsilon(1e-12));
}

TEST_CASE("classify sign rule") {
  CHECK(classify(3.2) == 1);
  CHECK(classify(-0.001) == -1);
  CHECK(classify(0.0) == 1);
  CHECK_THROWS_AS(classify(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
}

TEST_CASE("map_bruteforce oracle") {
  auto spec = AttributeSpec::gaussian_symmetric(1.2, 3);
  auto psi = PsiFn::from_spec(spec);

  SUBCASE("no neighbors reduces to sign of psi") {
    Rng rng(31);
    for (int i = 0; i < 100; ++i) {
      auto x = random_vec(rng, 3);
      const int expected = classify(psi(x));
      CHECK(map_bruteforce(x, {}, 0.3, 0.1, spec) == expected);
    }
  }
  SUBCASE("p = q decouples the neighbors") {
    Rng rng(32);
    for (int i = 0; i < 50; ++i) {
      auto x = random_vec(rng, 3);
      std::vector<std::vector<double>> nbs;
      for (int k = 0; k < 4; ++k) nbs.push_back(random_vec(rng, 3));
      CHECK(map_bruteforce(x, nbs, 0.2, 0.2, spec) == classify(psi(x)));
    }
  }
  SUBCASE("agrees with sign(propagate_nonlinear) on random stars") {
    Rng rng(33);
    const double pqs[][2] = {{0.3, 0.2}, {0.6, 0.2}, {0.2, 0.4}};
    int checked = 0;
    for (int i = 0; i < 200; ++i) {
      const auto& pq = pqs[i % 3];
      const double c = std::log(pq[0] / pq[1]);
      const std::size_t k = rng.below(9);
      auto x = random_vec(rng, 3);
      std::vector<std::vector<double>> nbs;
      for (std::size_t t = 0; t < k; ++t) nbs.push_back(random_vec(rng, 3));
      double score = psi(x);
      for (const auto& nb : nbs) score += phi(psi(nb), c);
      if (std::fabs(score) <= 1e-9) continue;
      ++checked;
      CHECK(map_bruteforce(x, nbs, pq[0], pq[1], spec) == classify(score));
    }
    CHECK(checked > 150);
  }
  SUBCASE("rejects oversized neighborhoods") {
    std::vector<std::vector<double>> nbs(21, std::vector<double>(3, 0.0));
    CHECK_THROWS_AS(map_bruteforce(std::vector<double>(3, 0.0), nbs, 0.3, 0.1, spec), std::invalid_argument);
  }
}

TEST_CASE("global class relabel negates every score exactly") {
  CsbmParams params;
  params.n = 400;
  params.p = 0.1;
  params.q = 0.3;  // heterophilic
  params.attr = AttributeSpec::gaussian({0.4, 0.1, -0.2}, {-0.1, 0.0, 0.3});
  params.seed = 71;
  auto g = sample_csbm(params);
  auto psi = PsiFn::gaussian(params.attr.mu, params.attr.nu);
  auto psi_swapped = PsiFn::gaussian(params.attr.nu, params.attr.mu);
  const double c = std::log(params.p / params.q);
  const auto values = psi_all(g, psi);
  const auto values_swapped = psi_all(g, psi_swapped);
  const auto scores = score_all_nonlinear(g, values, c);
  const auto scores_swapped = score_all_nonlinear(g, values_swapped, c);
  const auto lin = score_all_linear(g, values, -1.0);
  const auto lin_swapped = score_all_linear(g, values_swapped, -1.0);
  for (std::uint32_t v = 0; v < g.n; ++v) {
    CHECK(scores_swapped[v] == doctest::Approx(-scores[v]).epsilon(1e-12));
    CHECK(lin_swapped[v] == doctest::Approx(-lin[v]).epsilon(1e-12));
  }
}

TEST_CASE("score_all parallel paths match the serial reference bitwise") {
  CsbmParams params;
  params.n = 1500;
  params.p = 0.02;
  params.q = 0.008;
  params.attr = AttributeSpec::gaussian_symmetric(0.7, 5);
  params.seed = 2;
  auto g = sample_csbm(params);
  auto psi = PsiFn::from_spec(params.attr);
  const double c = std::log(params.p / params.q);
  const auto p1 = psi_all(g, psi, 1);
  const auto p4 = psi_all(g, psi, 4);
  CHECK(p1 == p4);
  CHECK(score_all_nonlinear(g, p1, c, 1) == score_all_nonlinear(g, p1, c, 4));
  CHECK(score_all_linear(g, p1, 1.0, 1) == score_all_linear(g, p1, 1.0, 4));
}

TEST_CASE("learned psi forms") {
  Rng rng(99);
  SUBCASE("affine form matches an equivalent nef transform") {
    auto f = PsiFn::learned({0.5, -1.0, 2.0}, 0.25);
    auto g = PsiFn::nef({0.5, -1.0, 2.0}, {0.0, 0.0, 0.0}, -0.25);
    for (int i = 0; i < 50; ++i) {
      auto x = random_vec(rng, 3, 2.0);
      CHECK(f(x) == doctest::Approx(g(x)).epsilon(1e-12));
    }
  }
  SUBCASE("clamped form reproduces the exact Laplace LLR") {
    const std::vector<double> mu{0.8, -0.4};
    const double b = 1.7;
    auto exact = PsiFn::laplace(mu, b);
    auto learned = PsiFn::learned({2.0 / b, 2.0 / b}, 0.0, mu);
    for (int i = 0; i < 50; ++i) {
      auto x = random_vec(rng, 2, 3.0);
      CHECK(learned(x) == doctest::Approx(exact(x)).epsilon(1e-12));
    }
  }
  SUBCASE("validation") {
    CHECK_THROWS_AS(PsiFn::learned({}, 0.0), std::invalid_argument);
    CHECK_THROWS_AS(PsiFn::learned({1.0, 2.0}, 0.0, {0.5}), std::invalid_argument);
  }
}

TEST_CASE("trainer-style psi and PsiFn::learned agree") {
  // same parameterization: proj * phi(x; |clamp|) + bias
  Rng rng(123);
  auto proj = random_vec(rng, 4);
  auto clamp = random_vec(rng, 4);
  for (auto& c : clamp) c = std::fabs(c) + 0.1;
  auto f = PsiFn::learned(proj, 0.4, clamp);
  for (int i = 0; i < 30; ++i) {
    auto x = random_vec(rng, 4, 2.0);
    double expected = 0.4;
    for (int k = 0; k < 4; ++k) expected += proj[k] * phi(x[k], clamp[k]);
    CHECK(f(x) == doctest::Approx(expected).epsilon(1e-12));
  }
}
