// Copyright (c) 2026 rfpc contributors.
// SPDX-License-Identifier: Apache-2.0
#include "rfpc/hdbscan.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <vector>

#include "rfpc/errors.hpp"
#include "rfpc/geometry.hpp"

namespace rfpc {
namespace {

struct MstEdge {
  int a = 0;
  int b = 0;
  double weight = 0.0;
};

// Dendrogram row i merges `left` and `right` into node id n+i.
struct MergeRow {
  int left = 0;
  int right = 0;
  double weight = 0.0;
  int size = 0;
};

struct CondensedRow {
  int parent = 0;
  int child = 0;
  double lambda = 0.0;
  int size = 0;
};

// Distance to the k-th nearest neighbor, the point itself counted first.
std::vector<double> core_distances(const std::vector<double>& matrix, int n,
                                   int k) {
  std::vector<double> core(static_cast<size_t>(n));
  std::vector<double> row(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) row[static_cast<size_t>(j)] = matrix[static_cast<size_t>(i) * n + j];
    std::nth_element(row.begin(), row.begin() + (k - 1), row.end());
    core[static_cast<size_t>(i)] = row[static_cast<size_t>(k - 1)];
  }
  return core;
}

// Prim's algorithm over the implicit mutual-reachability graph
// max{core_a, core_b, d(a,b)}.
std::vector<MstEdge> mutual_reachability_mst(const std::vector<double>& matrix,
                                             int n,
                                             const std::vector<double>& core) {
  std::vector<double> best(static_cast<size_t>(n), kInf);
  std::vector<int> from(static_cast<size_t>(n), 0);
  std::vector<char> in_tree(static_cast<size_t>(n), 0);
  std::vector<MstEdge> edges;
  edges.reserve(static_cast<size_t>(n - 1));
  int current = 0;
  in_tree[0] = 1;
  for (int added = 1; added < n; ++added) {
    for (int j = 0; j < n; ++j) {
      if (in_tree[static_cast<size_t>(j)]) continue;
      const double d = matrix[static_cast<size_t>(current) * n + j];
      const double w = std::max(std::max(core[static_cast<size_t>(current)],
                                         core[static_cast<size_t>(j)]),
                                d);
      if (w < best[static_cast<size_t>(j)]) {
        best[static_cast<size_t>(j)] = w;
        from[static_cast<size_t>(j)] = current;
      }
    }
    int pick = -1;
    for (int j = 0; j < n; ++j) {
      if (in_tree[static_cast<size_t>(j)]) continue;
      if (pick < 0 || best[static_cast<size_t>(j)] < best[static_cast<size_t>(pick)]) pick = j;
    }
    edges.push_back({from[static_cast<size_t>(pick)], pick, best[static_cast<size_t>(pick)]});
    in_tree[static_cast<size_t>(pick)] = 1;
    current = pick;
  }
  return edges;
}

// Single-linkage dendrogram from ascending-weight MST edges.
std::vector<MergeRow> single_linkage(std::vector<MstEdge> edges, int n) {
  std::sort(edges.begin(), edges.end(), [](const MstEdge& x, const MstEdge& y) {
    if (x.weight != y.weight) return x.weight < y.weight;
    if (x.a != y.a) return x.a < y.a;
    return x.b < y.b;
  });
  std::vector<int> parent(static_cast<size_t>(2 * n - 1));
  std::iota(parent.begin(), parent.end(), 0);
  std::vector<int> size(static_cast<size_t>(2 * n - 1), 1);
  const auto find = [&parent](int x) {
    while (parent[static_cast<size_t>(x)] != x) {
      parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
      x = parent[static_cast<size_t>(x)];
    }
    return x;
  };
  std::vector<MergeRow> rows;
  rows.reserve(edges.size());
  int next_label = n;
  for (const MstEdge& e : edges) {
    const int ra = find(e.a);
    const int rb = find(e.b);
    const int merged = size[static_cast<size_t>(ra)] + size[static_cast<size_t>(rb)];
    rows.push_back({ra, rb, e.weight, merged});
    parent[static_cast<size_t>(ra)] = next_label;
    parent[static_cast<size_t>(rb)] = next_label;
    size[static_cast<size_t>(next_label)] = merged;
    ++next_label;
  }
  return rows;
}

std::vector<int> bfs_from_dendrogram(const std::vector<MergeRow>& rows, int n,
                                     int start) {
  std::vector<int> result;
  std::vector<int> frontier{start};
  while (!frontier.empty()) {
    result.insert(result.end(), frontier.begin(), frontier.end());
    std::vector<int> next;
    for (const int node : frontier) {
      if (node < n) continue;
      const MergeRow& row = rows[static_cast<size_t>(node - n)];
      next.push_back(row.left);
      next.push_back(row.right);
    }
    frontier = std::move(next);
  }
  return result;
}

// Collapses the dendrogram: splits where both sides hold at least
// min_cluster_size points spawn child clusters; smaller sides dissolve into
// per-point exit rows at the split's lambda. The root keeps id n.
std::vector<CondensedRow> condense_tree(const std::vector<MergeRow>& rows,
                                        int n, int min_cluster_size) {
  const int root = 2 * n - 2;
  const std::vector<int> node_list = bfs_from_dendrogram(rows, n, root);
  std::vector<int> relabel(static_cast<size_t>(root + 1), -1);
  relabel[static_cast<size_t>(root)] = n;
  int next_label = n + 1;
  std::vector<char> ignore(static_cast<size_t>(root + 1), 0);
  std::vector<CondensedRow> out;

  const auto emit_points = [&](int sub_root, int parent_label, double lambda) {
    for (const int sub : bfs_from_dendrogram(rows, n, sub_root)) {
      if (sub < n) out.push_back({parent_label, sub, lambda, 1});
      ignore[static_cast<size_t>(sub)] = 1;
    }
  };

  for (const int node : node_list) {
    if (node < n || ignore[static_cast<size_t>(node)]) continue;
    const MergeRow& row = rows[static_cast<size_t>(node - n)];
    const double lambda = row.weight > 0.0 ? 1.0 / row.weight : kInf;
    const int left = row.left;
    const int right = row.right;
    const int left_count = left >= n ? rows[static_cast<size_t>(left - n)].size : 1;
    const int right_count = right >= n ? rows[static_cast<size_t>(right - n)].size : 1;
    const int label = relabel[static_cast<size_t>(node)];
    if (left_count >= min_cluster_size && right_count >= min_cluster_size) {
      relabel[static_cast<size_t>(left)] = next_label++;
      out.push_back({label, relabel[static_cast<size_t>(left)], lambda, left_count});
      relabel[static_cast<size_t>(right)] = next_label++;
      out.push_back({label, relabel[static_cast<size_t>(right)], lambda, right_count});
    } else if (left_count < min_cluster_size && right_count < min_cluster_size) {
      emit_points(left, label, lambda);
      emit_points(right, label, lambda);
    } else if (left_count < min_cluster_size) {
      relabel[static_cast<size_t>(right)] = label;
      emit_points(left, label, lambda);
    } else {
      relabel[static_cast<size_t>(left)] = label;
      emit_points(right, label, lambda);
    }
  }
  return out;
}

// Excess of mass per cluster node: sum over rows of
// (exit lambda - birth lambda) * exiting size.
std::map<int, double> compute_stability(const std::vector<CondensedRow>& tree,
                                        int n) {
  std::map<int, double> births;
  for (const CondensedRow& row : tree) {
    if (row.size > 1) births[row.child] = row.lambda;
  }
  births[n] = 0.0;
  std::map<int, double> stability;
  for (const CondensedRow& row : tree) {
    stability[row.parent] += (row.lambda - births.at(row.parent)) * row.size;
  }
  return stability;
}

} // namespace

HdbscanResult hdbscan_cluster(const std::vector<double>& distance_matrix,
                              int num_points, int min_cluster_size,
                              bool single_cluster) {
  const int n = num_points;
  if (n < 1) throw BadRange("hdbscan: need at least one point");
  if (min_cluster_size < 2) throw BadRange("hdbscan: min_cluster_size must be >= 2");
  if (distance_matrix.size() != static_cast<size_t>(n) * static_cast<size_t>(n)) {
    throw BadRange("hdbscan: distance matrix size does not match point count");
  }
  bool all_zero = true;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const double d = distance_matrix[static_cast<size_t>(i) * n + j];
      if (!std::isfinite(d) || d < 0.0) {
        throw BadRange("hdbscan: distances must be finite and non-negative");
      }
      if (i != j && d != 0.0) all_zero = false;
    }
  }

  HdbscanResult result;
  if (all_zero) {
    result.labels.assign(static_cast<size_t>(n), 0);
    result.num_clusters = 1;
    result.degenerate = true;
    return result;
  }

  const int core_k = std::min(min_cluster_size, n);
  const std::vector<double> core = core_distances(distance_matrix, n, core_k);
  const std::vector<MstEdge> mst = mutual_reachability_mst(distance_matrix, n, core);
  const std::vector<MergeRow> dendrogram = single_linkage(mst, n);
  const std::vector<CondensedRow> tree = condense_tree(dendrogram, n, min_cluster_size);
  std::map<int, double> stability = compute_stability(tree, n);

  std::map<int, std::vector<int>> cluster_children;
  for (const CondensedRow& row : tree) {
    if (row.size > 1) cluster_children[row.parent].push_back(row.child);
  }

  // Excess-of-mass selection, deepest nodes first. A node whose children
  // jointly beat it hands its (propagated) stability upward; otherwise it is
  // selected and its whole subtree is pruned.
  std::vector<int> node_list;
  for (const auto& [node, value] : stability) node_list.push_back(node);
  std::sort(node_list.rbegin(), node_list.rend());
  if (!single_cluster && !node_list.empty()) node_list.pop_back();

  std::map<int, bool> is_cluster;
  for (const int node : node_list) is_cluster[node] = true;
  for (const int node : node_list) {
    double child_sum = 0.0;
    const auto it = cluster_children.find(node);
    if (it != cluster_children.end()) {
      for (const int child : it->second) child_sum += stability.at(child);
    }
    if (child_sum > stability.at(node)) {
      is_cluster[node] = false;
      stability[node] = child_sum;
    } else {
      std::vector<int> frontier{node};
      while (!frontier.empty()) {
        std::vector<int> next;
        for (const int sub : frontier) {
          if (sub != node) is_cluster[sub] = false;
          const auto sub_it = cluster_children.find(sub);
          if (sub_it != cluster_children.end()) {
            next.insert(next.end(), sub_it->second.begin(), sub_it->second.end());
          }
        }
        frontier = std::move(next);
      }
    }
  }

  std::set<int> selected;
  for (const auto& [node, keep] : is_cluster) {
    if (keep) selected.insert(node);
  }
  std::map<int, int> label_of;
  int next = 0;
  for (const int node : selected) label_of[node] = next++;

  // Points union into their parents through every non-selected child edge;
  // the surviving representative is the containing selected cluster, if any.
  int max_id = n;
  for (const CondensedRow& row : tree) max_id = std::max(max_id, std::max(row.parent, row.child));
  std::vector<int> rep(static_cast<size_t>(max_id + 1));
  std::iota(rep.begin(), rep.end(), 0);
  const auto find = [&rep](int x) {
    while (rep[static_cast<size_t>(x)] != x) {
      rep[static_cast<size_t>(x)] = rep[static_cast<size_t>(rep[static_cast<size_t>(x)])];
      x = rep[static_cast<size_t>(x)];
    }
    return x;
  };
  for (const CondensedRow& row : tree) {
    if (selected.count(row.child)) continue;
    rep[static_cast<size_t>(find(row.child))] = find(row.parent);
  }

  const bool root_only = single_cluster && selected.size() == 1 && selected.count(n) > 0;
  double root_max_lambda = -kInf;
  std::vector<double> point_lambda(static_cast<size_t>(n), 0.0);
  for (const CondensedRow& row : tree) {
    if (row.parent == n && row.lambda > root_max_lambda) root_max_lambda = row.lambda;
    if (row.size == 1) point_lambda[static_cast<size_t>(row.child)] = row.lambda;
  }

  result.labels.assign(static_cast<size_t>(n), -1);
  for (int p = 0; p < n; ++p) {
    const int cluster = find(p);
    if (cluster == n) {
      if (root_only && point_lambda[static_cast<size_t>(p)] >= root_max_lambda) {
        result.labels[static_cast<size_t>(p)] = label_of.at(n);
      }
    } else if (label_of.count(cluster)) {
      result.labels[static_cast<size_t>(p)] = label_of.at(cluster);
    }
  }

  std::set<int> present;
  for (const int label : result.labels) {
    if (label >= 0) present.insert(label);
  }
  result.num_clusters = static_cast<int>(present.size());
  return result;
}

} // namespace rfpc
