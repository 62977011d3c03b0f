#pragma once

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "osgnn/graph.hpp"

namespace osgnn {

struct SplitError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Mode { inductive, transductive };
enum class Phase { train, val, test };

inline std::string to_string(Mode m) { return m == Mode::inductive ? "inductive" : "transductive"; }
inline Mode mode_from_string(const std::string& s) {
  if (s == "inductive") return Mode::inductive;
  if (s == "transductive") return Mode::transductive;
  throw std::invalid_argument("unknown mode: " + s);
}

// Known/unknown class partition plus stratified node index sets.
// Known classes are relabeled 0..C-1 preserving their original order;
// every unknown class maps to unknown_label == C.
struct OpenSetSplit {
  std::vector<int> known_classes;    // original class ids, order preserved
  std::vector<int> unknown_classes;  // original class ids
  std::vector<index_t> train_idx;
  std::vector<index_t> val_idx;
  std::vector<index_t> test_idx;
  Mode mode = Mode::inductive;
  int unknown_label = 0;             // == num_known()
  std::vector<int> open_labels;      // per node: 0..C-1 known, C unknown

  int num_known() const { return static_cast<int>(known_classes.size()); }
};

struct SplitFractions {
  double train = 0.7;
  double val = 0.1;
  double test = 0.2;
};

// Per known class: train = floor(f_tr * n_c), val = floor(f_val * n_c),
// remainder to test. All unknown-class nodes go to test.
inline OpenSetSplit make_open_split(const Graph& g, const std::vector<int>& unknown_class_ids,
                                    SplitFractions fractions, std::uint64_t seed, Mode mode) {
  if (unknown_class_ids.empty()) throw SplitError("make_open_split: no unknown classes given");
  std::set<int> unknown(unknown_class_ids.begin(), unknown_class_ids.end());
  for (int u : unknown)
    if (u < 0 || u >= g.num_classes()) throw SplitError("make_open_split: invalid class id " + std::to_string(u));
  if (static_cast<int>(unknown.size()) >= g.num_classes())
    throw SplitError("make_open_split: no known class remains");
  if (!(fractions.train > 0.0) || fractions.val < 0.0 || fractions.test < 0.0 ||
      fractions.train + fractions.val + fractions.test > 1.0 + 1e-9)
    throw SplitError("make_open_split: bad fractions");

  OpenSetSplit s;
  s.mode = mode;
  s.unknown_classes.assign(unknown.begin(), unknown.end());
  std::vector<int> relabel(static_cast<std::size_t>(g.num_classes()), -1);
  for (int c = 0; c < g.num_classes(); ++c) {
    if (!unknown.count(c)) {
      relabel[static_cast<std::size_t>(c)] = static_cast<int>(s.known_classes.size());
      s.known_classes.push_back(c);
    }
  }
  s.unknown_label = s.num_known();

  s.open_labels.resize(static_cast<std::size_t>(g.n));
  std::vector<std::vector<index_t>> members(static_cast<std::size_t>(g.num_classes()));
  for (index_t i = 0; i < g.n; ++i) {
    const int c = g.labels[static_cast<std::size_t>(i)];
    members[static_cast<std::size_t>(c)].push_back(i);
    s.open_labels[static_cast<std::size_t>(i)] = unknown.count(c) ? s.unknown_label : relabel[static_cast<std::size_t>(c)];
  }

  std::mt19937_64 rng(seed);
  for (int c : s.known_classes) {
    auto nodes = members[static_cast<std::size_t>(c)];
    if (nodes.size() < 3)
      throw SplitError("make_open_split: known class " + std::to_string(c) + " has fewer than 3 nodes");
    std::shuffle(nodes.begin(), nodes.end(), rng);
    const auto n_tr = static_cast<std::size_t>(std::floor(fractions.train * static_cast<double>(nodes.size())));
    const auto n_val = static_cast<std::size_t>(std::floor(fractions.val * static_cast<double>(nodes.size())));
    for (std::size_t i = 0; i < nodes.size(); ++i) {
      if (i < n_tr)
        s.train_idx.push_back(nodes[i]);
      else if (i < n_tr + n_val)
        s.val_idx.push_back(nodes[i]);
      else
        s.test_idx.push_back(nodes[i]);
    }
  }
  for (int c : s.unknown_classes)
    for (index_t i : members[static_cast<std::size_t>(c)]) s.test_idx.push_back(i);
  std::sort(s.train_idx.begin(), s.train_idx.end());
  std::sort(s.val_idx.begin(), s.val_idx.end());
  std::sort(s.test_idx.begin(), s.test_idx.end());
  return s;
}

// A phase-visible graph: local node space plus the mapping back to the
// parent graph.
struct VisibleGraph {
  Graph graph;
  std::vector<index_t> global_nodes;  // local -> global
  std::vector<index_t> local_index;   // global -> local, -1 if absent
};

inline VisibleGraph induced_subgraph(const Graph& g, const std::vector<index_t>& keep_sorted) {
  VisibleGraph v;
  v.global_nodes = keep_sorted;
  v.local_index.assign(static_cast<std::size_t>(g.n), -1);
  for (std::size_t l = 0; l < keep_sorted.size(); ++l)
    v.local_index[static_cast<std::size_t>(keep_sorted[l])] = static_cast<index_t>(l);

  Graph& out = v.graph;
  out.n = static_cast<index_t>(keep_sorted.size());
  out.d = g.d;
  out.class_names = g.class_names;
  out.features = DenseMatrix(out.n, out.d);
  out.labels.resize(static_cast<std::size_t>(out.n));
  for (index_t l = 0; l < out.n; ++l) {
    const index_t gi = keep_sorted[static_cast<std::size_t>(l)];
    std::copy(g.features.row(gi), g.features.row(gi) + g.d, out.features.row(l));
    out.labels[static_cast<std::size_t>(l)] = g.labels[static_cast<std::size_t>(gi)];
    out.node_ids.push_back(g.node_ids.empty() ? std::string() : g.node_ids[static_cast<std::size_t>(gi)]);
  }
  EdgeList edges;
  for (auto [i, j] : g.undirected_edges()) {
    const index_t li = v.local_index[static_cast<std::size_t>(i)];
    const index_t lj = v.local_index[static_cast<std::size_t>(j)];
    if (li >= 0 && lj >= 0) edges.emplace_back(li, lj);
  }
  out.adjacency = adjacency_from_edges(out.n, edges);
  return v;
}

inline VisibleGraph full_view(const Graph& g) {
  VisibleGraph v;
  v.graph = g;
  v.global_nodes.resize(static_cast<std::size_t>(g.n));
  v.local_index.resize(static_cast<std::size_t>(g.n));
  for (index_t i = 0; i < g.n; ++i) {
    v.global_nodes[static_cast<std::size_t>(i)] = i;
    v.local_index[static_cast<std::size_t>(i)] = i;
  }
  return v;
}

// Inductive training sees only the induced train subgraph; inductive
// validation sees train+val; testing and every transductive phase see the
// full graph.
inline VisibleGraph visible_graph(const Graph& g, const OpenSetSplit& s, Phase phase) {
  if (s.mode == Mode::transductive || phase == Phase::test) return full_view(g);
  if (phase == Phase::train) return induced_subgraph(g, s.train_idx);
  std::vector<index_t> keep = s.train_idx;
  keep.insert(keep.end(), s.val_idx.begin(), s.val_idx.end());
  std::sort(keep.begin(), keep.end());
  return induced_subgraph(g, keep);
}

}  // namespace osgnn
