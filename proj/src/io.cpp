#include "csbm/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "csbm/rng.hpp"

namespace csbm {

using nlohmann::json;

std::string format_double(double x) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), x);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, ptr);
}

double parse_double(const std::string& s) {
  double x = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), x);
  if (ec != std::errc{} || ptr != s.data() + s.size()) {
    throw std::runtime_error("parse_double: malformed value '" + s + "'");
  }
  return x;
}

namespace {

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary: no platform newline translation
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  return out;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  return in;
}

json attr_to_json(const AttributeSpec& spec) {
  json j;
  switch (spec.kind) {
    case AttributeSpec::Kind::gaussian:
      j["kind"] = "gaussian";
      j["mu"] = spec.mu;
      j["nu"] = spec.nu;
      break;
    case AttributeSpec::Kind::laplace:
      j["kind"] = "laplace";
      j["mu"] = spec.mu;
      j["b"] = spec.b;
      break;
    case AttributeSpec::Kind::nef:
      j["kind"] = "nef";
      j["theta1"] = spec.mu;
      j["theta_neg1"] = spec.nu;
      j["delta_log_partition"] = spec.delta_log_partition;
      break;
  }
  j["m"] = spec.dim();
  return j;
}

AttributeSpec attr_from_json(const json& j) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "gaussian") {
    return AttributeSpec::gaussian(j.at("mu").get<std::vector<double>>(), j.at("nu").get<std::vector<double>>());
  }
  if (kind == "laplace") {
    return AttributeSpec::laplace(j.at("mu").get<std::vector<double>>(), j.at("b").get<double>());
  }
  if (kind == "nef") {
    return AttributeSpec::nef(j.at("theta1").get<std::vector<double>>(),
                              j.at("theta_neg1").get<std::vector<double>>(),
                              j.at("delta_log_partition").get<double>());
  }
  throw std::runtime_error("unknown attribute kind in header: " + kind);
}

}  // namespace

void save_graph(const AttributedGraph& g, const std::string& base) {
  {
    json header;
    header["n"] = g.n;
    header["m"] = g.m;
    header["edges"] = g.num_edges();
    header["files"] = {{"edges", base + ".edges"}, {"labels", base + ".labels"}, {"attrs", base + ".attrs.csv"}};
    if (g.params) {
      header["params"] = {{"n", g.params->n},
                          {"p", format_double(g.params->p)},
                          {"q", format_double(g.params->q)},
                          {"attr", attr_to_json(g.params->attr)},
                          {"seed", g.params->seed}};
    }
    if (!g.source_tag.empty()) header["source"] = g.source_tag;
    auto out = open_out(base + ".json");
    out << header.dump(2) << "\n";
  }
  {
    auto out = open_out(base + ".edges");
    std::string line;
    for (std::uint32_t v = 0; v < g.n; ++v) {
      for (std::uint32_t u : g.neighbors_of(v)) {
        if (v < u) {
          line.clear();
          line += std::to_string(v);
          line += ' ';
          line += std::to_string(u);
          line += '\n';
          out << line;
        }
      }
    }
  }
  {
    auto out = open_out(base + ".labels");
    for (std::uint32_t v = 0; v < g.n; ++v) out << (g.labels[v] == 1 ? "1\n" : "-1\n");
  }
  {
    auto out = open_out(base + ".attrs.csv");
    std::string line;
    for (std::uint32_t v = 0; v < g.n; ++v) {
      line.clear();
      auto row = g.attr_row(v);
      for (std::uint32_t i = 0; i < g.m; ++i) {
        if (i) line += ',';
        line += format_double(row[i]);
      }
      line += '\n';
      out << line;
    }
  }
}

AttributedGraph load_graph(const std::string& base) {
  json header;
  {
    auto in = open_in(base + ".json");
    in >> header;
  }
  const std::uint32_t n = header.at("n").get<std::uint32_t>();
  const std::uint32_t m = header.at("m").get<std::uint32_t>();

  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
  {
    auto in = open_in(base + ".edges");
    std::uint64_t u, v;
    while (in >> u >> v) {
      if (u >= n || v >= n || u >= v) throw std::runtime_error("malformed edge record in " + base + ".edges");
      edges.emplace_back(static_cast<std::uint32_t>(u), static_cast<std::uint32_t>(v));
    }
  }
  std::vector<std::int8_t> labels;
  labels.reserve(n);
  {
    auto in = open_in(base + ".labels");
    int y;
    while (in >> y) {
      if (y != 1 && y != -1) throw std::runtime_error("label outside {-1, +1} in " + base + ".labels");
      labels.push_back(static_cast<std::int8_t>(y));
    }
    if (labels.size() != n) throw std::runtime_error("label count mismatch in " + base + ".labels");
  }
  std::vector<double> attrs;
  attrs.reserve(static_cast<std::size_t>(n) * m);
  {
    auto in = open_in(base + ".attrs.csv");
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::size_t start = 0;
      while (start <= line.size()) {
        const std::size_t comma = line.find(',', start);
        const std::size_t end = comma == std::string::npos ? line.size() : comma;
        attrs.push_back(parse_double(line.substr(start, end - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
      }
    }
    if (attrs.size() != static_cast<std::size_t>(n) * m) {
      throw std::runtime_error("attribute matrix shape mismatch in " + base + ".attrs.csv");
    }
  }
  auto g = AttributedGraph::from_edge_list(n, m, edges, std::move(labels), std::move(attrs));
  if (header.contains("params")) {
    const auto& pj = header["params"];
    CsbmParams params;
    params.n = pj.at("n").get<std::uint64_t>();
    params.p = parse_double(pj.at("p").get<std::string>());
    params.q = parse_double(pj.at("q").get<std::string>());
    params.attr = attr_from_json(pj.at("attr"));
    params.seed = pj.at("seed").get<std::uint64_t>();
    g.params = params;
  }
  if (header.contains("source")) g.source_tag = header["source"].get<std::string>();
  return g;
}

void write_sweep_csv(const ExperimentResult& result, const std::string& path) {
  auto out = open_out(path);
  out << "# " << result.name << "\n";
  out << "# n,p,q,sep,model,regime,mean_accuracy,std_accuracy,trial_accuracies...,trial_seeds...\n";
  for (const auto& row : result.rows) {
    out << row.n << ',' << format_double(row.p) << ',' << format_double(row.q) << ',' << format_double(row.sep)
        << ',' << row.model << ',' << row.regime << ',' << format_double(row.mean_accuracy) << ','
        << format_double(row.std_accuracy);
    for (double a : row.trial_accuracy) out << ',' << format_double(a);
    for (std::uint64_t s : row.trial_seeds) out << ',' << s;
    out << '\n';
  }
}

void write_transition_csv(const TransitionResult& result, const std::string& path) {
  auto out = open_out(path);
  out << "# " << result.name << " n=" << result.n << "\n";
  out << "# p,q,sep,skipped,acc_nonlinear,acc_linear,gap\n";
  for (const auto& row : result.rows) {
    out << format_double(row.p) << ',' << format_double(row.q) << ',' << format_double(row.sep) << ','
        << (row.skipped ? 1 : 0) << ',' << format_double(row.acc_nonlinear) << ','
        << format_double(row.acc_linear) << ',' << format_double(row.gap) << '\n';
  }
}

void write_transfer_csv(const TransferResult& result, const std::string& path) {
  auto out = open_out(path);
  out << "# " << result.name << " n=" << result.n << "\n";
  out << "# intensity,theta,dxi_nonlinear,dxi_nonlinear_se,dxi_linear,dxi_linear_se,ratio,ratio_se,flagged\n";
  for (const auto& row : result.rows) {
    out << format_double(row.intensity) << ',' << format_double(row.theta) << ','
        << format_double(row.dxi_nonlinear) << ',' << format_double(row.dxi_nonlinear_se) << ','
        << format_double(row.dxi_linear) << ',' << format_double(row.dxi_linear_se) << ','
        << format_double(row.ratio) << ',' << format_double(row.ratio_se) << ',' << (row.flagged ? 1 : 0) << '\n';
  }
}

void write_scores_csv(const AttributedGraph& g, const std::vector<double>& nonlinear,
                      const std::vector<double>& linear, const std::string& path) {
  if (nonlinear.size() != g.n || linear.size() != g.n) throw std::invalid_argument("score vector size mismatch");
  auto out = open_out(path);
  out << "# node,label,score_nonlinear,score_linear,pred_nl,pred_lin\n";
  for (std::uint32_t v = 0; v < g.n; ++v) {
    out << v << ',' << static_cast<int>(g.labels[v]) << ',' << format_double(nonlinear[v]) << ','
        << format_double(linear[v]) << ',' << (nonlinear[v] >= 0.0 ? 1 : -1) << ','
        << (linear[v] >= 0.0 ? 1 : -1) << '\n';
  }
}

void write_manifest(const RunManifest& manifest, const std::string& path) {
  json j;
  j["tool"] = kToolVersion;
  j["rng"] = kRngVersion;
  j["subcommand"] = manifest.subcommand;
  j["parameters"] = json::parse(manifest.parameters_json.empty() ? "{}" : manifest.parameters_json);
  j["master_seed"] = manifest.master_seed;
  j["threads"] = manifest.threads;
  j["outputs"] = manifest.outputs;
  j["wall_clock_sec"] = manifest.wall_clock_sec;
  auto out = open_out(path);
  out << j.dump(2) << "\n";
}

}  // namespace csbm
