#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "csbm/io.hpp"
#include "csbm/propagation.hpp"
#include "csbm/realdata.hpp"
#include "csbm/sampler.hpp"
#include "doctest.h"

using namespace csbm;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("csbm_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path);
  out << content;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

}  // namespace

TEST_CASE("format_double round-trips exactly") {
  for (double x : {0.1, 1.0 / 3.0, -2.5e-308, 1.7976931348623157e308, 0.0, -0.0, 123456.789}) {
    CHECK(parse_double(format_double(x)) == x);
  }
}

TEST_CASE("graph serialization round-trips bit-exactly") {
  CsbmParams params;
  params.n = 300;
  params.p = 0.08;
  params.q = 0.02;
  params.attr = AttributeSpec::gaussian_symmetric(0.737, 3);
  params.seed = 4242;
  const auto g = sample_csbm(params);

  TempDir dir;
  const std::string base = dir.file("graph");
  save_graph(g, base);
  const auto loaded = load_graph(base);
  CHECK(loaded.n == g.n);
  CHECK(loaded.m == g.m);
  CHECK(loaded.offsets == g.offsets);
  CHECK(loaded.neighbors == g.neighbors);
  CHECK(loaded.labels == g.labels);
  CHECK(loaded.attrs == g.attrs);
  REQUIRE(loaded.params.has_value());
  CHECK(loaded.params->p == g.params->p);
  CHECK(loaded.params->seed == g.params->seed);

  // saving the loaded graph reproduces the files byte for byte
  const std::string base2 = dir.file("graph2");
  save_graph(loaded, base2);
  for (const char* suffix : {".edges", ".labels", ".attrs.csv"}) {
    CHECK(read_file(base + suffix) == read_file(base2 + suffix));
  }
}

TEST_CASE("sweep csv output is byte-stable") {
  SweepSpec spec;
  spec.name = "csv-test";
  spec.rule_p = {4.0, 0.0, -0.5};
  spec.rule_q = {2.0, 0.0, -0.5};
  spec.rule_sep = ScheduleRule::constant(0.5);
  spec.m = 3;
  spec.n_grid = {500};
  spec.trials = 2;
  spec.master_seed = 8;
  TempDir dir;
  write_sweep_csv(sweep_n(spec, 1), dir.file("a.csv"));
  write_sweep_csv(sweep_n(spec, 4), dir.file("b.csv"));
  CHECK(read_file(dir.file("a.csv")) == read_file(dir.file("b.csv")));
  CHECK(read_file(dir.file("a.csv")).substr(0, 1) == "#");
}

TEST_CASE("load_topology sanitizes and validates") {
  TempDir dir;
  write_file(dir.file("toy.edges"), "# toy graph\n0 1\n1 2\n2 2\n0 1\n");
  write_file(dir.file("toy.labels"), "0\n1\n1\n");
  const auto topo = load_topology(dir.file("toy.edges"), dir.file("toy.labels"), "toy");
  CHECK(topo.n == 3);
  CHECK(topo.edges.size() == 2);
  CHECK(topo.dropped_self_loops == 1);
  CHECK(topo.dropped_duplicates == 1);
  CHECK(topo.num_classes == 2);

  write_file(dir.file("bad.edges"), "0 7\n");
  CHECK_THROWS_AS(load_topology(dir.file("bad.edges"), dir.file("toy.labels")), std::runtime_error);

  write_file(dir.file("gap.labels"), "0\n2\n2\n");
  CHECK_THROWS_AS(load_topology(dir.file("toy.edges"), dir.file("gap.labels")), std::runtime_error);
}

TEST_CASE("binarize") {
  LabeledTopology topo;
  topo.n = 6;
  topo.num_classes = 3;
  topo.classes = {0, 0, 1, 1, 2, 2};

  const auto ova = binarize(topo, BinarizationRule::one_vs_all(1));
  CHECK(ova.positive_count == 2);
  CHECK(ova.negative_count == 4);
  CHECK(ova.labels[2] == 1);
  CHECK(ova.labels[0] == -1);

  const auto svs = binarize(topo, BinarizationRule::several_vs_several({0, 2}));
  CHECK(svs.positive_count == 4);
  CHECK(svs.labels[1] == 1);
  CHECK(svs.labels[3] == -1);

  CHECK_THROWS_AS(binarize(topo, BinarizationRule::one_vs_all(9)), std::invalid_argument);
  CHECK_THROWS_AS(binarize(topo, BinarizationRule::several_vs_several({0, 1, 2})), std::invalid_argument);
  CHECK_THROWS_AS(binarize(topo, BinarizationRule::several_vs_several({})), std::invalid_argument);
}

TEST_CASE("estimate_pq") {
  SUBCASE("two disjoint same-class cliques floor q") {
    LabeledTopology topo;
    topo.n = 6;
    topo.num_classes = 2;
    topo.classes = {0, 0, 0, 1, 1, 1};
    topo.edges = {{0, 1}, {0, 2}, {1, 2}, {3, 4}, {3, 5}, {4, 5}};
    const auto est = estimate_pq(topo, binarize(topo, BinarizationRule::one_vs_all(0)).labels);
    CHECK(est.p == doctest::Approx(1.0));
    CHECK(est.q_floored);
    CHECK(est.q == doctest::Approx(1.0 / 9.0));
  }
  SUBCASE("complete bipartite floors p") {
    LabeledTopology topo;
    topo.n = 4;
    topo.num_classes = 2;
    topo.classes = {0, 0, 1, 1};
    topo.edges = {{0, 2}, {0, 3}, {1, 2}, {1, 3}};
    const auto est = estimate_pq(topo, binarize(topo, BinarizationRule::one_vs_all(0)).labels);
    CHECK(est.q == doctest::Approx(1.0));
    CHECK(est.p_floored);
  }
  SUBCASE("recovers generative p, q within 4 sigma on a CSBM topology") {
    CsbmParams params;
    params.n = 4000;
    params.p = 0.03;
    params.q = 0.01;
    params.attr = AttributeSpec::gaussian_symmetric(0.1, 2);
    params.seed = 77;
    const auto g = sample_csbm(params);
    LabeledTopology topo;
    topo.n = g.n;
    topo.num_classes = 2;
    topo.classes.resize(g.n);
    for (std::uint32_t v = 0; v < g.n; ++v) topo.classes[v] = g.labels[v] == 1 ? 0 : 1;
    for (std::uint32_t v = 0; v < g.n; ++v) {
      for (std::uint32_t u : g.neighbors_of(v)) {
        if (v < u) topo.edges.push_back({v, u});
      }
    }
    const auto est = estimate_pq(topo, std::vector<std::int8_t>(g.labels));
    std::int64_t n1 = 0;
    for (auto y : g.labels) n1 += y == 1 ? 1 : 0;
    const double intra_pairs = 0.5 * (n1 * (n1 - 1.0) + (g.n - n1) * (g.n - n1 - 1.0));
    const double inter_pairs = static_cast<double>(n1) * (g.n - n1);
    CHECK(std::fabs(est.p - params.p) <= 4.0 * std::sqrt(params.p * (1 - params.p) / intra_pairs));
    CHECK(std::fabs(est.q - params.q) <= 4.0 * std::sqrt(params.q * (1 - params.q) / inter_pairs));
  }
}

TEST_CASE("make_train_test_pair contracts") {
  LabeledTopology topo = make_surrogate_citation(1);
  const auto bin = binarize(topo, BinarizationRule::one_vs_all(3));
  const auto spec = AttributeSpec::gaussian_symmetric(1.0, 5);

  const auto [train1, test1] = make_train_test_pair(topo, bin.labels, spec, 42);
  const auto [train2, test2] = make_train_test_pair(topo, bin.labels, spec, 42);
  CHECK(train1.attrs == train2.attrs);
  CHECK(test1.attrs == test2.attrs);
  CHECK(train1.attrs != test1.attrs);
  CHECK(train1.neighbors == test1.neighbors);
  CHECK(train1.labels == test1.labels);

  const auto [train3, test3] = make_train_test_pair(topo, bin.labels, spec, 43);
  CHECK(train3.neighbors == train1.neighbors);
  CHECK(train3.attrs != train1.attrs);
}

TEST_CASE("uninformative attributes leave only the class prior") {
  LabeledTopology topo = make_surrogate_citation(2);
  auto bin = binarize(topo, BinarizationRule::several_vs_several({0, 1, 2}));
  // mu = nu: psi is identically 0 and the +1 tie rule predicts the positive side
  const auto spec = AttributeSpec::gaussian(std::vector<double>(4, 0.2), std::vector<double>(4, 0.2));
  const auto [train, test] = make_train_test_pair(topo, bin.labels, spec, 3);
  const auto psi = PsiFn::from_spec(spec);
  std::int64_t correct = 0;
  for (std::uint32_t v = 0; v < test.n; ++v) {
    const double score = psi(test.attr_row(v));
    correct += ((score >= 0.0 ? 1 : -1) == test.labels[v]) ? 1 : 0;
  }
  CHECK(static_cast<double>(correct) / test.n ==
        doctest::Approx(static_cast<double>(bin.positive_count) / topo.n).epsilon(1e-12));
}

TEST_CASE("topology round-trips through the documented file formats") {
  const auto topo = make_surrogate_citation(5);
  TempDir dir;
  {
    std::ofstream edges(dir.file("t.edges"));
    edges << "# edge list\n";
    for (const auto& [u, v] : topo.edges) edges << u << ' ' << v << '\n';
    std::ofstream labels(dir.file("t.labels"));
    for (std::uint32_t c : topo.classes) labels << c << '\n';
  }
  const auto loaded = load_topology(dir.file("t.edges"), dir.file("t.labels"));
  CHECK(loaded.n == topo.n);
  CHECK(loaded.edges == topo.edges);
  CHECK(loaded.classes == topo.classes);
  CHECK(loaded.num_classes == topo.num_classes);
  CHECK(loaded.dropped_self_loops == 0);
  CHECK(loaded.dropped_duplicates == 0);
}

TEST_CASE("surrogate citation topology") {
  const auto topo = make_surrogate_citation(7);
  CHECK(topo.n == 2708);
  CHECK(topo.num_classes == 7);
  CHECK(topo.edges.size() > 4000);
  CHECK(topo.edges.size() < 7000);
  const auto bin = binarize(topo, BinarizationRule::one_vs_all(0));
  const auto est = estimate_pq(topo, bin.labels);
  CHECK(est.p > est.q);  // homophilic like the citation graphs it stands in for
}
