#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "edaqa/dataset.hpp"

namespace edaqa {

struct ForestParams {
  int n_trees = 500;
  int max_features = 0;  // 0 -> floor(sqrt(#features))
  std::uint64_t seed = 0;
};

/// Flat-array CART tree. feature[i] < 0 marks a leaf.
struct DecisionTree {
  std::vector<int> feature;
  std::vector<double> threshold;
  std::vector<int> left;
  std::vector<int> right;
  std::vector<std::array<int, 2>> counts;  // class counts reaching the node

  /// Leaf majority; ties -> Noisy.
  template <typename Row>
  int predict(const Row& x) const {
    int node = 0;
    while (feature[static_cast<std::size_t>(node)] >= 0) {
      const auto n = static_cast<std::size_t>(node);
      node = x(feature[n]) <= threshold[n] ? left[n] : right[n];
    }
    const auto& c = counts[static_cast<std::size_t>(node)];
    return c[kClean] > c[kNoisy] ? kClean : kNoisy;
  }
  std::size_t node_count() const { return feature.size(); }
};

struct RFModel {
  std::vector<DecisionTree> trees;
  Vec importance;  // mean decrease in Gini impurity, sums to 1 when any split exists
  int n_features = 0;
  int max_features = 0;
  std::uint64_t seed = 0;
  bool single_class = false;  // trained on one class; predicts it constantly
};

/// Bootstrap + Gini CART grown to purity, sqrt-feature subsampling per node.
/// Deterministic for a given seed regardless of worker count.
RFModel rf_train(const Dataset& data, const ForestParams& params = {});

/// Majority vote over trees; ties -> Noisy.
int rf_predict_one(const RFModel& model, const Eigen::Ref<const Eigen::RowVectorXd>& x);
Labels rf_predict(const RFModel& model, const Mat& X);

}  // namespace edaqa
