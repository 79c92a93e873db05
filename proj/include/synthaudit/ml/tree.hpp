#pragma once

// Decision-tree primitives shared by the boosted and bagged ensembles.

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

#include "synthaudit/rng.hpp"

namespace synthaudit {

struct TreeNode {
  int feature = -1;  // -1 marks a leaf
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  double value = 0.0;  // leaf output
};

struct TreeModel {
  std::vector<TreeNode> nodes;

  double predict_row(const Eigen::MatrixXd& X, Eigen::Index r) const {
    int i = 0;
    while (nodes[i].feature >= 0)
      i = X(r, nodes[i].feature) <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
    return nodes[i].value;
  }

  std::size_t internal_count() const {
    std::size_t c = 0;
    for (const auto& n : nodes) c += n.feature >= 0;
    return c;
  }
};

namespace detail {

struct GbmTreeParams {
  int max_splits = 4;
  double lambda = 1.0;
  double min_child_weight = 1e-3;
};

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
  double g_left = 0.0, h_left = 0.0;
};

// Exact greedy split search on second-order statistics.
inline SplitChoice best_gbm_split(const Eigen::MatrixXd& X, const std::vector<std::size_t>& rows,
                                  const std::vector<double>& grad, const std::vector<double>& hess,
                                  double g_total, double h_total, const GbmTreeParams& prm) {
  SplitChoice best;
  const double parent_term = g_total * g_total / (h_total + prm.lambda);
  std::vector<std::pair<double, std::size_t>> sorted;
  sorted.reserve(rows.size());
  for (int j = 0; j < X.cols(); ++j) {
    sorted.clear();
    for (std::size_t r : rows) sorted.emplace_back(X(r, j), r);
    std::sort(sorted.begin(), sorted.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    double gl = 0.0, hl = 0.0;
    for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
      gl += grad[sorted[i].second];
      hl += hess[sorted[i].second];
      if (sorted[i].first == sorted[i + 1].first) continue;
      const double gr = g_total - gl;
      const double hr = h_total - hl;
      if (hl < prm.min_child_weight || hr < prm.min_child_weight) continue;
      const double gain = 0.5 * (gl * gl / (hl + prm.lambda) + gr * gr / (hr + prm.lambda) -
                                 parent_term);
      if (gain > best.gain + 1e-12) {
        best.feature = j;
        best.threshold = 0.5 * (sorted[i].first + sorted[i + 1].first);
        best.gain = gain;
        best.g_left = gl;
        best.h_left = hl;
      }
    }
  }
  return best;
}

// Grow a regression tree on gradients best-first, up to max_splits internal
// nodes. Leaf values are the Newton step -G/(H+lambda).
inline TreeModel build_gbm_tree(const Eigen::MatrixXd& X, const std::vector<std::size_t>& rows,
                                const std::vector<double>& grad, const std::vector<double>& hess,
                                const GbmTreeParams& prm) {
  struct Leaf {
    int node;
    std::vector<std::size_t> rows;
    double g, h;
    SplitChoice split;
  };

  TreeModel tree;
  double g0 = 0.0, h0 = 0.0;
  for (std::size_t r : rows) {
    g0 += grad[r];
    h0 += hess[r];
  }
  tree.nodes.push_back({-1, 0.0, -1, -1, -g0 / (h0 + prm.lambda)});

  std::vector<Leaf> open;
  open.push_back({0, rows, g0, h0, best_gbm_split(X, rows, grad, hess, g0, h0, prm)});

  int splits = 0;
  while (splits < prm.max_splits) {
    std::size_t pick = open.size();
    double best_gain = 0.0;
    for (std::size_t i = 0; i < open.size(); ++i) {
      if (open[i].split.feature >= 0 && open[i].split.gain > best_gain + 1e-12) {
        best_gain = open[i].split.gain;
        pick = i;
      }
    }
    if (pick == open.size()) break;

    Leaf leaf = std::move(open[pick]);
    open.erase(open.begin() + static_cast<std::ptrdiff_t>(pick));

    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : leaf.rows)
      (X(r, leaf.split.feature) <= leaf.split.threshold ? left_rows : right_rows).push_back(r);

    const double gl = leaf.split.g_left, hl = leaf.split.h_left;
    const double gr = leaf.g - gl, hr = leaf.h - hl;

    const int li = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({-1, 0.0, -1, -1, -gl / (hl + prm.lambda)});
    const int ri = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({-1, 0.0, -1, -1, -gr / (hr + prm.lambda)});

    auto& parent = tree.nodes[leaf.node];
    parent.feature = leaf.split.feature;
    parent.threshold = leaf.split.threshold;
    parent.left = li;
    parent.right = ri;
    ++splits;

    open.push_back({li, left_rows, gl, hl, best_gbm_split(X, left_rows, grad, hess, gl, hl, prm)});
    open.push_back(
        {ri, right_rows, gr, hr, best_gbm_split(X, right_rows, grad, hess, gr, hr, prm)});
  }
  return tree;
}

struct CartParams {
  int max_depth = 64;
  std::size_t min_split = 2;
  std::size_t mtry = 0;  // features examined per split; 0 = all
};

inline double gini_impurity(double n_pos, double n_total) {
  if (n_total == 0.0) return 0.0;
  const double p = n_pos / n_total;
  return 2.0 * p * (1.0 - p);
}

// Classification tree on a bootstrap sample with per-split feature
// subsampling. Accumulates impurity-decrease importances weighted by node
// size relative to the sample.
inline TreeModel build_cart_tree(const Eigen::MatrixXd& X, const std::vector<double>& y,
                                 std::vector<std::size_t> rows, const CartParams& prm, Rng& rng,
                                 std::vector<double>& importance) {
  TreeModel tree;
  const double n_total = static_cast<double>(rows.size());
  const std::size_t p = static_cast<std::size_t>(X.cols());

  struct Item {
    int node;
    std::vector<std::size_t> rows;
    int depth;
  };
  std::vector<Item> stack;

  auto leaf_value = [&](const std::vector<std::size_t>& rs) {
    double pos = 0.0;
    for (std::size_t r : rs) pos += y[r];
    return pos / static_cast<double>(rs.size());
  };

  tree.nodes.push_back({-1, 0.0, -1, -1, leaf_value(rows)});
  stack.push_back({0, std::move(rows), 0});

  std::vector<std::pair<double, std::size_t>> sorted;
  while (!stack.empty()) {
    Item item = std::move(stack.back());
    stack.pop_back();
    const auto& rs = item.rows;
    const double n_node = static_cast<double>(rs.size());

    double pos = 0.0;
    for (std::size_t r : rs) pos += y[r];
    const double imp = gini_impurity(pos, n_node);
    if (item.depth >= prm.max_depth || rs.size() < prm.min_split || imp == 0.0) continue;

    const std::size_t mtry = prm.mtry == 0 ? p : std::min(prm.mtry, p);
    auto features = rng.sample_without_replacement(p, mtry);

    int best_feature = -1;
    double best_threshold = 0.0, best_decrease = 0.0;
    for (std::size_t f : features) {
      sorted.clear();
      for (std::size_t r : rs) sorted.emplace_back(X(r, f), r);
      std::sort(sorted.begin(), sorted.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      double pos_left = 0.0;
      for (std::size_t i = 0; i + 1 < sorted.size(); ++i) {
        pos_left += y[sorted[i].second];
        if (sorted[i].first == sorted[i + 1].first) continue;
        const double nl = static_cast<double>(i + 1);
        const double nr = n_node - nl;
        const double decrease = imp - (nl / n_node) * gini_impurity(pos_left, nl) -
                                (nr / n_node) * gini_impurity(pos - pos_left, nr);
        if (decrease > best_decrease + 1e-12) {
          best_decrease = decrease;
          best_feature = static_cast<int>(f);
          best_threshold = 0.5 * (sorted[i].first + sorted[i + 1].first);
        }
      }
    }
    if (best_feature < 0) continue;

    importance[static_cast<std::size_t>(best_feature)] += (n_node / n_total) * best_decrease;

    std::vector<std::size_t> left_rows, right_rows;
    for (std::size_t r : rs)
      (X(r, best_feature) <= best_threshold ? left_rows : right_rows).push_back(r);

    const int li = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({-1, 0.0, -1, -1, leaf_value(left_rows)});
    const int ri = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back({-1, 0.0, -1, -1, leaf_value(right_rows)});

    auto& node = tree.nodes[item.node];
    node.feature = best_feature;
    node.threshold = best_threshold;
    node.left = li;
    node.right = ri;

    stack.push_back({ri, std::move(right_rows), item.depth + 1});
    stack.push_back({li, std::move(left_rows), item.depth + 1});
  }
  return tree;
}

}  // namespace detail
}  // namespace synthaudit
