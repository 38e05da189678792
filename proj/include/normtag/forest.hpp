#pragma once

// Random-forest classifier built from scratch: CART trees on Gini impurity
// with bootstrap resampling and per-split feature subsampling. Used to score
// normalization candidates, so prediction exposes class probabilities.

#include <cstdint>
#include <string>
#include <vector>

namespace normtag::forest {

struct ForestConfig {
  int n_trees = 100;
  int max_depth = 0;           // split levels; 0 means unlimited
  int min_samples_split = 2;
  int features_per_split = 0;  // 0 means floor(sqrt(n_features)), at least 1
  bool bootstrap = true;
  uint64_t seed = 1;
};

// feature < 0 marks a leaf; leaves carry a class-probability vector.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  int left = -1;
  int right = -1;
  std::vector<double> probs;
};

struct Tree {
  std::vector<TreeNode> nodes;  // nodes[0] is the root
};

class Forest {
 public:
  // Rows of X share one width; y holds labels in 0..K-1. Splits pick the
  // (feature, midpoint threshold) pair with minimal weighted Gini among the
  // drawn features; ties go to the lowest feature index, then the lowest
  // threshold. Deterministic given config.seed.
  static Forest fit(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                    const ForestConfig& config);

  // Mean of per-tree leaf probability vectors.
  std::vector<double> predict_proba(const std::vector<double>& x) const;

  // Argmax of predict_proba, lowest class index on ties.
  int predict(const std::vector<double>& x) const;

  int n_classes() const { return n_classes_; }
  int n_features() const { return n_features_; }
  const std::vector<Tree>& trees() const { return trees_; }

  std::string serialize() const;
  static Forest deserialize(const std::string& bytes);

 private:
  int n_classes_ = 0;
  int n_features_ = 0;
  std::vector<Tree> trees_;
};

}  // namespace normtag::forest
