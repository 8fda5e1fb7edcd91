#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "bivarfun/dense/norms.hpp"
#include "bivarfun/dense/reorder.hpp"
#include "bivarfun/dense/sylvester.hpp"

namespace bivarfun {

/// Ordered eigenvalue blocks. blocks[k] lists original diagonal positions; after
/// reordering by `permutation` block k occupies [offset(k), offset(k) + size).
struct Partition {
  std::vector<std::vector<std::size_t>> blocks;
  double delta = 0.1;
  std::vector<std::size_t> permutation;

  std::size_t size() const { return permutation.size(); }
  std::size_t offset(std::size_t k) const {
    std::size_t o = 0;
    for (std::size_t b = 0; b < k; ++b) o += blocks[b].size();
    return o;
  }
  std::vector<std::size_t> block_sizes() const {
    std::vector<std::size_t> s;
    for (const auto& b : blocks) s.push_back(b.size());
    return s;
  }
};

namespace detail {
struct UnionFind {
  std::vector<std::size_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), std::size_t{0}); }
  std::size_t find(std::size_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};
}  // namespace detail

/// Connected components of the graph joining eigenvalues at distance <= delta.
inline Partition blocking(std::span<const cplx> eigs, double delta) {
  if (!(delta > 0.0)) throw ArgumentError("blocking: delta must be positive");
  const std::size_t m = eigs.size();
  detail::UnionFind uf(m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (std::abs(eigs[i] - eigs[j]) <= delta) uf.unite(i, j);
  std::vector<std::vector<std::size_t>> comps;
  std::vector<long> slot(m, -1);
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t r = uf.find(i);
    if (slot[r] < 0) {
      slot[r] = static_cast<long>(comps.size());
      comps.emplace_back();
    }
    comps[static_cast<std::size_t>(slot[r])].push_back(i);
  }
  std::vector<double> mean(comps.size());
  for (std::size_t k = 0; k < comps.size(); ++k) {
    double s = 0.0;
    for (std::size_t i : comps[k]) s += eigs[i].real();
    mean[k] = s / static_cast<double>(comps[k].size());
  }
  std::vector<std::size_t> ord(comps.size());
  std::iota(ord.begin(), ord.end(), std::size_t{0});
  std::stable_sort(ord.begin(), ord.end(), [&](std::size_t a, std::size_t b) { return mean[a] < mean[b]; });
  Partition P;
  P.delta = delta;
  for (std::size_t k : ord) {
    P.blocks.push_back(comps[k]);
    P.permutation.insert(P.permutation.end(), comps[k].begin(), comps[k].end());
  }
  return P;
}

inline Partition blocking(const SchurForm& S, double delta) {
  const auto d = diag_of(S.T);
  return blocking(std::span<const cplx>(d), delta);
}

enum class SplitStrategy { Balanced, Single };

struct TreeNode {
  std::size_t begin = 0, end = 0;              // reordered index range
  std::size_t first_block = 0, last_block = 0;  // atomic blocks [first, last)
  int left = -1, right = -1;
  ComplexMatrix V;  // solves T11 V - V T22 = T12 at internal nodes
  double ratio = 0.0;
  bool merged = false;

  bool is_leaf() const { return left < 0; }
  std::size_t size() const { return end - begin; }
  std::size_t mid(const std::vector<TreeNode>& nodes) const { return nodes[static_cast<std::size_t>(left)].end; }
};

struct PartitionTree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root

  const TreeNode& root() const { return nodes.front(); }
  const TreeNode& node(int i) const { return nodes[static_cast<std::size_t>(i)]; }
  std::size_t leaf_count() const {
    std::size_t c = 0;
    count_leaves(0, c);
    return c;
  }
  std::vector<std::pair<std::size_t, std::size_t>> leaves() const {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    collect(0, out);
    return out;
  }
  std::size_t depth() const { return depth_of(0); }

private:
  void count_leaves(int i, std::size_t& c) const {
    const auto& n = node(i);
    if (n.is_leaf()) {
      ++c;
      return;
    }
    count_leaves(n.left, c);
    count_leaves(n.right, c);
  }
  void collect(int i, std::vector<std::pair<std::size_t, std::size_t>>& out) const {
    const auto& n = node(i);
    if (n.is_leaf()) {
      out.emplace_back(n.begin, n.end);
      return;
    }
    collect(n.left, out);
    collect(n.right, out);
  }
  std::size_t depth_of(int i) const {
    const auto& n = node(i);
    if (n.is_leaf()) return 1;
    return 1 + std::max(depth_of(n.left), depth_of(n.right));
  }
};

namespace detail {
inline int build_node(PartitionTree& t, const std::vector<std::size_t>& sizes, std::size_t b0, std::size_t b1,
                      std::size_t begin, SplitStrategy strategy, std::size_t n_min) {
  std::size_t card = 0;
  for (std::size_t b = b0; b < b1; ++b) card += sizes[b];
  const int id = static_cast<int>(t.nodes.size());
  t.nodes.push_back({});
  t.nodes.back().begin = begin;
  t.nodes.back().end = begin + card;
  t.nodes.back().first_block = b0;
  t.nodes.back().last_block = b1;
  if (b1 - b0 <= 1 || card <= n_min) return id;
  std::size_t split = b1 - 1;
  if (strategy == SplitStrategy::Balanced) {
    std::size_t best = static_cast<std::size_t>(-1), left = 0;
    for (std::size_t s = b0 + 1; s < b1; ++s) {
      left += sizes[s - 1];
      const std::size_t right = card - left;
      const std::size_t diff = left > right ? left - right : right - left;
      if (diff < best) {  // strict: ties keep the smaller left side
        best = diff;
        split = s;
      }
    }
  }
  std::size_t lcard = 0;
  for (std::size_t b = b0; b < split; ++b) lcard += sizes[b];
  const int l = build_node(t, sizes, b0, split, begin, strategy, n_min);
  const int r = build_node(t, sizes, split, b1, begin + lcard, strategy, n_min);
  t.nodes[static_cast<std::size_t>(id)].left = l;
  t.nodes[static_cast<std::size_t>(id)].right = r;
  return id;
}
}  // namespace detail

/// Split tree over the atomic blocks of P. Nodes with at most n_min indices stay leaves.
inline PartitionTree build_tree(const Partition& P, SplitStrategy strategy, std::size_t n_min = 1) {
  PartitionTree t;
  const auto sizes = P.block_sizes();
  if (sizes.empty()) {
    t.nodes.push_back({});
    return t;
  }
  detail::build_node(t, sizes, 0, sizes.size(), 0, strategy, std::max<std::size_t>(n_min, 1));
  return t;
}

struct SylvesterOptions {
  double gamma = 10.0;
  double delta = 0.1;
  bool allow_merge = true;  // only the perturb-and-diagonalize atom tolerates merged blocks
  char side = 'A';
};

namespace detail {
inline void copy_subtree(const PartitionTree& src, int i, PartitionTree& dst, int parent_slot_owner, bool is_left) {
  const int id = static_cast<int>(dst.nodes.size());
  dst.nodes.push_back(src.node(i));
  if (parent_slot_owner >= 0) {
    auto& p = dst.nodes[static_cast<std::size_t>(parent_slot_owner)];
    (is_left ? p.left : p.right) = id;
  }
  const TreeNode n = src.node(i);
  if (n.is_leaf()) return;
  dst.nodes[static_cast<std::size_t>(id)].left = dst.nodes[static_cast<std::size_t>(id)].right = -1;
  copy_subtree(src, n.left, dst, id, true);
  copy_subtree(src, n.right, dst, id, false);
}

inline void precompute_node(const ComplexMatrix& T, PartitionTree& t, int i, const SylvesterOptions& opt,
                            std::vector<std::string>* log) {
  TreeNode& n = t.nodes[static_cast<std::size_t>(i)];
  if (n.is_leaf()) return;
  const std::size_t b = n.begin, mid = n.mid(t.nodes), e = n.end;
  const ComplexMatrix T11 = T.block(b, b, mid - b, mid - b);
  const ComplexMatrix T22 = T.block(mid, mid, e - mid, e - mid);
  const ComplexMatrix T12 = T.block(b, mid, mid - b, e - mid);
  ComplexMatrix V;
  try {
    V = sylvester_tri(T11, T22, T12);
  } catch (const SingularityError& err) {
    throw InternalError(std::string("precompute_sylvesters: eigenvalue collision across a split: ") + err.what());
  }
  const double nT12 = spectral_norm(T12);
  const double r = nT12 == 0.0 ? 0.0 : spectral_norm(V) / nT12;
  const double thresh = opt.gamma / opt.delta;
  TreeNode& node = t.nodes[static_cast<std::size_t>(i)];
  node.ratio = r;
  if (r > thresh) {
    char buf[200];
    if (opt.allow_merge) {
      std::snprintf(buf, sizeof buf, "MERGE side=%c idx=%zu:%zu r=%.6g thresh=%.6g", opt.side, b, e, r, thresh);
      if (log) log->emplace_back(buf);
      node.left = node.right = -1;
      node.merged = true;
      return;
    }
    std::snprintf(buf, sizeof buf, "WARN ill-conditioned split kept side=%c idx=%zu:%zu r=%.6g thresh=%.6g", opt.side,
                  b, e, r, thresh);
    if (log) log->emplace_back(buf);
  }
  node.V = std::move(V);
  const int l = node.left, rr = node.right;
  precompute_node(T, t, l, opt, log);
  precompute_node(T, t, rr, opt, log);
}
}  // namespace detail

/// Solves the Sylvester equation of every internal node (top-down, depth first) and
/// collapses nodes whose solution is too large relative to the coupling block.
inline PartitionTree precompute_sylvesters(const ComplexMatrix& T, PartitionTree tree, const SylvesterOptions& opt,
                                           std::vector<std::string>* log = nullptr) {
  if (tree.nodes.empty() || tree.root().size() == 0) return tree;
  detail::precompute_node(T, tree, 0, opt, log);
  // drop subtrees orphaned by merges
  PartitionTree out;
  detail::copy_subtree(tree, 0, out, -1, true);
  return out;
}

inline std::size_t count_merged(const PartitionTree& t) {
  std::size_t c = 0;
  for (const auto& n : t.nodes) c += n.merged ? 1 : 0;
  return c;
}

}  // namespace bivarfun
