#include "edaqa/forest.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <numeric>
#include <random>

#include "edaqa/parallel.hpp"

namespace edaqa {

namespace {

double gini(double c0, double c1) {
  const double n = c0 + c1;
  if (n <= 0.0) return 0.0;
  const double p0 = c0 / n;
  const double p1 = c1 / n;
  return 1.0 - p0 * p0 - p1 * p1;
}

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double decrease = -1.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const Dataset& data, int max_features, std::uint64_t seed)
      : data_(data), max_features_(max_features), rng_(seed) {}

  DecisionTree build(Vec& importance) {
    const auto n = static_cast<std::size_t>(data_.rows());
    std::uniform_int_distribution<std::size_t> pick(0, n - 1);
    std::vector<Eigen::Index> sample(n);
    for (auto& s : sample) s = static_cast<Eigen::Index>(pick(rng_));
    total_ = static_cast<double>(n);

    struct Pending {
      int node;
      std::vector<Eigen::Index> rows;
    };
    std::vector<Pending> stack;
    stack.push_back({add_node(sample), std::move(sample)});
    while (!stack.empty()) {
      Pending p = std::move(stack.back());
      stack.pop_back();
      const auto& c = tree_.counts[static_cast<std::size_t>(p.node)];
      if (c[0] == 0 || c[1] == 0) continue;
      const SplitChoice s = best_split(p.rows, c);
      if (s.feature < 0) continue;
      std::vector<Eigen::Index> lrows, rrows;
      for (auto r : p.rows) (data_.X(r, s.feature) <= s.threshold ? lrows : rrows).push_back(r);
      importance(s.feature) += s.decrease / total_;
      const int l = add_node(lrows);
      const int r = add_node(rrows);
      const auto idx = static_cast<std::size_t>(p.node);
      tree_.feature[idx] = s.feature;
      tree_.threshold[idx] = s.threshold;
      tree_.left[idx] = l;
      tree_.right[idx] = r;
      stack.push_back({r, std::move(rrows)});
      stack.push_back({l, std::move(lrows)});
    }
    return std::move(tree_);
  }

 private:
  int add_node(const std::vector<Eigen::Index>& rows) {
    std::array<int, 2> c{0, 0};
    for (auto r : rows) ++c[static_cast<std::size_t>(data_.y(r))];
    tree_.feature.push_back(-1);
    tree_.threshold.push_back(0.0);
    tree_.left.push_back(-1);
    tree_.right.push_back(-1);
    tree_.counts.push_back(c);
    return static_cast<int>(tree_.feature.size()) - 1;
  }

  // Tries a random subset of max_features columns; if none of them can split
  // the node, keeps drawing from the remaining columns.
  SplitChoice best_split(const std::vector<Eigen::Index>& rows, const std::array<int, 2>& counts) {
    const int d = static_cast<int>(data_.cols());
    std::vector<int> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), 0);
    const double n = static_cast<double>(rows.size());
    const double parent = n * gini(counts[0], counts[1]);
    SplitChoice best;
    std::vector<std::pair<double, int>> vals(rows.size());
    for (int k = 0; k < d; ++k) {
      std::uniform_int_distribution<int> pick(k, d - 1);
      std::swap(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(pick(rng_))]);
      const int f = order[static_cast<std::size_t>(k)];
      for (std::size_t i = 0; i < rows.size(); ++i) vals[i] = {data_.X(rows[i], f), data_.y(rows[i])};
      std::sort(vals.begin(), vals.end());
      double l0 = 0, l1 = 0;
      for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
        (vals[i].second == kClean ? l0 : l1) += 1.0;
        if (!(vals[i].first < vals[i + 1].first)) continue;
        const double r0 = counts[0] - l0;
        const double r1 = counts[1] - l1;
        const double child = (l0 + l1) * gini(l0, l1) + (r0 + r1) * gini(r0, r1);
        const double dec = parent - child;
        if (dec > best.decrease) {
          best.decrease = dec;
          best.feature = f;
          double mid = 0.5 * (vals[i].first + vals[i + 1].first);
          if (!(mid < vals[i + 1].first)) mid = vals[i].first;
          best.threshold = mid;
        }
      }
      if (k + 1 >= max_features_ && best.feature >= 0) break;
    }
    if (best.decrease < 0.0) best.decrease = 0.0;
    return best;
  }

  const Dataset& data_;
  int max_features_;
  std::mt19937_64 rng_;
  DecisionTree tree_;
  double total_ = 1.0;
};

}  // namespace

RFModel rf_train(const Dataset& data, const ForestParams& params) {
  data.check();
  if (data.rows() < 1) throw RejectedInput("rf_train: empty dataset");
  if (params.n_trees < 1) throw RejectedInput("rf_train: n_trees must be >= 1");
  RFModel model;
  model.n_features = static_cast<int>(data.cols());
  model.max_features = params.max_features > 0
                           ? std::min(params.max_features, model.n_features)
                           : std::max(1, static_cast<int>(std::floor(std::sqrt(static_cast<double>(model.n_features)))));
  model.seed = params.seed;
  model.importance = Vec::Zero(model.n_features);
  if (!data.has_both_classes()) {
    std::cerr << "warning: rf_train: single-class training data; forest predicts a constant class\n";
    model.single_class = true;
  }

  const auto n_trees = static_cast<std::size_t>(params.n_trees);
  model.trees.resize(n_trees);
  std::vector<Vec> per_tree(n_trees, Vec::Zero(model.n_features));
  parallel_for(n_trees, [&](std::size_t t) {
    TreeBuilder builder(data, model.max_features, derive_seed(params.seed, t));
    model.trees[t] = builder.build(per_tree[t]);
  });
  for (const auto& imp : per_tree) model.importance += imp;
  const double total = model.importance.sum();
  if (total > 0.0) model.importance /= total;
  return model;
}

int rf_predict_one(const RFModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x) {
  if (x.size() != model.n_features) throw RejectedInput("rf_predict: feature count mismatch");
  int votes = 0;
  for (const auto& t : model.trees) votes += t.predict(x);
  const int against = static_cast<int>(model.trees.size()) - votes;
  return votes >= against ? kNoisy : kClean;
}

Labels rf_predict(const RFModel& model, const Mat& X) {
  Labels out(X.rows());
  for (Eigen::Index i = 0; i < X.rows(); ++i) out(i) = rf_predict_one(model, X.row(i));
  return out;
}

}  // namespace edaqa
