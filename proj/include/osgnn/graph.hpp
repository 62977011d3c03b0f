#pragma once

#include <cstdio>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "osgnn/matrix.hpp"

namespace osgnn {

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using EdgeList = std::vector<std::pair<index_t, index_t>>;

// Immutable node-classified graph. Adjacency is symmetric with no stored
// self loops; labels index into class_names.
struct Graph {
  index_t n = 0;
  index_t d = 0;
  DenseMatrix features;            // n x d
  SparseMatrix adjacency;          // n x n, symmetric
  std::vector<int> labels;         // per node, 0..num_classes()-1
  std::vector<std::string> class_names;
  std::vector<std::string> node_ids;
  index_t source_edges = 0;        // unique directed input pairs, pre-symmetrization
  index_t skipped_edges = 0;       // cites lines referencing unknown node ids

  int num_classes() const { return static_cast<int>(class_names.size()); }
  index_t undirected_edge_count() const { return adjacency.nnz() / 2; }

  EdgeList undirected_edges() const {
    EdgeList out;
    out.reserve(static_cast<std::size_t>(undirected_edge_count()));
    for (index_t i = 0; i < n; ++i)
      for (index_t k = adjacency.row_ptr[i]; k < adjacency.row_ptr[i + 1]; ++k)
        if (i < adjacency.col_idx[k]) out.emplace_back(i, adjacency.col_idx[k]);
    return out;
  }

  std::vector<index_t> degrees() const {
    std::vector<index_t> deg(static_cast<std::size_t>(n));
    for (index_t i = 0; i < n; ++i) deg[i] = adjacency.row_ptr[i + 1] - adjacency.row_ptr[i];
    return deg;
  }
};

inline SparseMatrix adjacency_from_edges(index_t n, const EdgeList& edges) {
  std::vector<std::tuple<index_t, index_t, double>> trip;
  trip.reserve(edges.size() * 2);
  for (auto [i, j] : edges) {
    trip.emplace_back(i, j, 1.0);
    trip.emplace_back(j, i, 1.0);
  }
  auto adj = SparseMatrix::from_triplets(n, n, std::move(trip));
  for (auto& v : adj.values) v = 1.0;  // collapse any duplicate edges
  return adj;
}

namespace detail {

inline std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) out.push_back(std::move(tok));
  return out;
}

}  // namespace detail

// Plain-text citation format:
//   content: node_id <TAB> f_1 .. f_d <TAB> class_name
//   cites:   cited <TAB> citing
// String ids become dense indices in file order; class names are numbered in
// first-seen order; edges are symmetrized with duplicates and self loops
// dropped. Cites lines naming unknown ids are skipped and counted.
inline Graph load_content_cites(const std::string& content_path, const std::string& cites_path) {
  std::ifstream content(content_path);
  if (!content) throw ParseError("cannot open content file: " + content_path);

  Graph g;
  std::unordered_map<std::string, index_t> id_of;
  std::unordered_map<std::string, int> class_of;
  std::vector<std::vector<double>> feat_rows;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(content, line)) {
    ++lineno;
    auto toks = detail::split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() < 3) throw ParseError(content_path + ":" + std::to_string(lineno) + ": too few fields");
    const index_t d = static_cast<index_t>(toks.size()) - 2;
    if (g.d == 0 && feat_rows.empty()) g.d = d;
    if (d != g.d)
      throw ParseError(content_path + ":" + std::to_string(lineno) + ": expected " +
                       std::to_string(g.d) + " features, got " + std::to_string(d));
    const std::string& id = toks.front();
    if (id_of.count(id)) throw ParseError(content_path + ":" + std::to_string(lineno) + ": duplicate node id " + id);
    id_of[id] = static_cast<index_t>(feat_rows.size());
    g.node_ids.push_back(id);
    std::vector<double> row(static_cast<std::size_t>(g.d));
    for (index_t j = 0; j < g.d; ++j) {
      try {
        row[static_cast<std::size_t>(j)] = std::stod(toks[static_cast<std::size_t>(j) + 1]);
      } catch (const std::exception&) {
        throw ParseError(content_path + ":" + std::to_string(lineno) + ": bad feature value");
      }
    }
    feat_rows.push_back(std::move(row));
    const std::string& cls = toks.back();
    auto it = class_of.find(cls);
    int cid;
    if (it == class_of.end()) {
      cid = static_cast<int>(g.class_names.size());
      class_of[cls] = cid;
      g.class_names.push_back(cls);
    } else {
      cid = it->second;
    }
    g.labels.push_back(cid);
  }
  g.n = static_cast<index_t>(feat_rows.size());
  g.features = DenseMatrix(g.n, g.d);
  for (index_t i = 0; i < g.n; ++i)
    std::copy(feat_rows[static_cast<std::size_t>(i)].begin(), feat_rows[static_cast<std::size_t>(i)].end(),
              g.features.row(i));

  std::ifstream cites(cites_path);
  if (!cites) throw ParseError("cannot open cites file: " + cites_path);
  std::set<std::pair<index_t, index_t>> directed;
  std::set<std::pair<index_t, index_t>> undirected;
  lineno = 0;
  while (std::getline(cites, line)) {
    ++lineno;
    auto toks = detail::split_ws(line);
    if (toks.empty()) continue;
    if (toks.size() != 2) throw ParseError(cites_path + ":" + std::to_string(lineno) + ": expected 2 fields");
    auto a = id_of.find(toks[0]);
    auto b = id_of.find(toks[1]);
    if (a == id_of.end() || b == id_of.end()) {
      ++g.skipped_edges;
      continue;
    }
    if (a->second == b->second) continue;  // self edge
    directed.emplace(a->second, b->second);
    undirected.emplace(std::min(a->second, b->second), std::max(a->second, b->second));
  }
  g.source_edges = static_cast<index_t>(directed.size());
  g.adjacency = adjacency_from_edges(g.n, EdgeList(undirected.begin(), undirected.end()));
  return g;
}

// Inverse of load_content_cites; feature values printed with enough digits
// to round-trip.
inline void write_content_cites(const Graph& g, const std::string& content_path,
                                const std::string& cites_path) {
  std::ofstream content(content_path);
  if (!content) throw ParseError("cannot open for write: " + content_path);
  char buf[32];
  for (index_t i = 0; i < g.n; ++i) {
    content << g.node_ids[static_cast<std::size_t>(i)];
    for (index_t j = 0; j < g.d; ++j) {
      std::snprintf(buf, sizeof(buf), "%.17g", g.features(i, j));
      content << '\t' << buf;
    }
    content << '\t' << g.class_names[static_cast<std::size_t>(g.labels[static_cast<std::size_t>(i)])] << '\n';
  }
  std::ofstream cites(cites_path);
  if (!cites) throw ParseError("cannot open for write: " + cites_path);
  for (auto [i, j] : g.undirected_edges())
    cites << g.node_ids[static_cast<std::size_t>(i)] << '\t' << g.node_ids[static_cast<std::size_t>(j)] << '\n';
}

// Canonical single-document JSON dataset. Serialization is deterministic
// (sorted keys, exact double round-trip), so prepare is idempotent.
inline nlohmann::json graph_to_json(const Graph& g) {
  nlohmann::json j;
  j["schema_version"] = 1;
  j["n"] = g.n;
  j["d"] = g.d;
  j["classes"] = g.class_names;
  j["ids"] = g.node_ids;
  nlohmann::json feats = nlohmann::json::array();
  for (index_t i = 0; i < g.n; ++i) {
    nlohmann::json row = nlohmann::json::array();
    for (index_t k = 0; k < g.d; ++k) row.push_back(g.features(i, k));
    feats.push_back(std::move(row));
  }
  j["features"] = std::move(feats);
  nlohmann::json edges = nlohmann::json::array();
  for (auto [a, b] : g.undirected_edges()) edges.push_back({a, b});
  j["edges"] = std::move(edges);
  j["labels"] = g.labels;
  j["source_edges"] = g.source_edges;
  j["skipped_edges"] = g.skipped_edges;
  return j;
}

inline Graph graph_from_json(const nlohmann::json& j) {
  Graph g;
  if (!j.contains("schema_version") || j.at("schema_version").get<int>() != 1)
    throw ParseError("canonical dataset: unsupported schema_version");
  g.n = j.at("n").get<index_t>();
  g.d = j.at("d").get<index_t>();
  g.class_names = j.at("classes").get<std::vector<std::string>>();
  g.node_ids = j.at("ids").get<std::vector<std::string>>();
  g.labels = j.at("labels").get<std::vector<int>>();
  if (static_cast<index_t>(g.labels.size()) != g.n || static_cast<index_t>(g.node_ids.size()) != g.n)
    throw ParseError("canonical dataset: length mismatch");
  g.features = DenseMatrix(g.n, g.d);
  const auto& feats = j.at("features");
  if (static_cast<index_t>(feats.size()) != g.n) throw ParseError("canonical dataset: feature rows != n");
  for (index_t i = 0; i < g.n; ++i) {
    const auto& row = feats[static_cast<std::size_t>(i)];
    if (static_cast<index_t>(row.size()) != g.d) throw ParseError("canonical dataset: ragged feature row");
    for (index_t k = 0; k < g.d; ++k) g.features(i, k) = row[static_cast<std::size_t>(k)].get<double>();
  }
  EdgeList edges;
  for (const auto& e : j.at("edges")) edges.emplace_back(e[0].get<index_t>(), e[1].get<index_t>());
  g.adjacency = adjacency_from_edges(g.n, edges);
  g.source_edges = j.value("source_edges", index_t{0});
  g.skipped_edges = j.value("skipped_edges", index_t{0});
  return g;
}

inline void save_canonical(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot open for write: " + path);
  out << graph_to_json(g).dump() << '\n';
}

inline Graph load_canonical(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open canonical dataset: " + path);
  nlohmann::json j;
  in >> j;
  return graph_from_json(j);
}

// Symmetric GCN normalization D^{-1/2} (A + I) D^{-1/2}.
struct NormalizedAdjacency {
  SparseMatrix matrix;
};

inline NormalizedAdjacency normalize_gcn_edges(index_t n, const EdgeList& edges,
                                               const EdgeList& extra_edges = {}) {
  std::set<std::pair<index_t, index_t>> undirected;
  for (auto [i, j] : edges)
    if (i != j) undirected.emplace(std::min(i, j), std::max(i, j));
  for (auto [i, j] : extra_edges)
    if (i != j) undirected.emplace(std::min(i, j), std::max(i, j));

  std::vector<double> deg(static_cast<std::size_t>(n), 1.0);  // self loop
  for (auto [i, j] : undirected) {
    deg[static_cast<std::size_t>(i)] += 1.0;
    deg[static_cast<std::size_t>(j)] += 1.0;
  }
  std::vector<std::tuple<index_t, index_t, double>> trip;
  trip.reserve(undirected.size() * 2 + static_cast<std::size_t>(n));
  for (index_t i = 0; i < n; ++i) trip.emplace_back(i, i, 1.0 / deg[static_cast<std::size_t>(i)]);
  for (auto [i, j] : undirected) {
    const double v = 1.0 / std::sqrt(deg[static_cast<std::size_t>(i)] * deg[static_cast<std::size_t>(j)]);
    trip.emplace_back(i, j, v);
    trip.emplace_back(j, i, v);
  }
  return {SparseMatrix::from_triplets(n, n, std::move(trip))};
}

inline NormalizedAdjacency normalize_gcn(const Graph& g, const EdgeList& extra_edges = {}) {
  return normalize_gcn_edges(g.n, g.undirected_edges(), extra_edges);
}

// Stochastic block model with one Gaussian feature centroid per block.
struct SbmParams {
  int blocks = 3;
  std::vector<index_t> sizes;
  double p_in = 0.1;
  double p_out = 0.005;
  index_t d = 16;
  std::uint64_t seed = 0;
  double centroid_scale = 3.0;
  double noise = 1.0;
};

inline Graph gen_sbm(const SbmParams& p) {
  if (p.blocks != static_cast<int>(p.sizes.size()))
    throw std::invalid_argument("gen_sbm: blocks != sizes.size()");
  if (!(p.p_in > p.p_out)) throw std::invalid_argument("gen_sbm: requires p_in > p_out");
  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  Graph g;
  g.n = 0;
  for (index_t s : p.sizes) g.n += s;
  g.d = p.d;
  g.features = DenseMatrix(g.n, g.d);
  g.labels.resize(static_cast<std::size_t>(g.n));

  DenseMatrix centroids(p.blocks, p.d);
  for (auto& v : centroids.data) v = p.centroid_scale * gauss(rng);

  index_t node = 0;
  for (int b = 0; b < p.blocks; ++b) {
    g.class_names.push_back("block_" + std::to_string(b));
    for (index_t t = 0; t < p.sizes[static_cast<std::size_t>(b)]; ++t, ++node) {
      g.labels[static_cast<std::size_t>(node)] = b;
      for (index_t k = 0; k < g.d; ++k)
        g.features(node, k) = centroids(b, k) + p.noise * gauss(rng);
    }
  }
  std::vector<int> block_of(static_cast<std::size_t>(g.n));
  node = 0;
  for (int b = 0; b < p.blocks; ++b)
    for (index_t t = 0; t < p.sizes[static_cast<std::size_t>(b)]; ++t, ++node) block_of[static_cast<std::size_t>(node)] = b;

  EdgeList edges;
  for (index_t i = 0; i < g.n; ++i)
    for (index_t j = i + 1; j < g.n; ++j) {
      const double prob = block_of[static_cast<std::size_t>(i)] == block_of[static_cast<std::size_t>(j)] ? p.p_in : p.p_out;
      if (unif(rng) < prob) edges.emplace_back(i, j);
    }
  g.adjacency = adjacency_from_edges(g.n, edges);
  g.source_edges = static_cast<index_t>(edges.size());
  for (index_t i = 0; i < g.n; ++i) g.node_ids.push_back("n_" + std::to_string(i));
  return g;
}

}  // namespace osgnn
