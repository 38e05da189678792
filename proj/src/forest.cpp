#include "normtag/forest.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <random>

#include "normtag/bytes.hpp"
#include "normtag/error.hpp"

namespace normtag::forest {

namespace {

double gini(const std::vector<double>& counts, double n) {
  if (n <= 0.0) return 0.0;
  double sum_sq = 0.0;
  for (double c : counts) {
    double p = c / n;
    sum_sq += p * p;
  }
  return 1.0 - sum_sq;
}

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double score = 0.0;
};

class TreeBuilder {
 public:
  TreeBuilder(const std::vector<std::vector<double>>& X, const std::vector<int>& y, int n_classes,
              const ForestConfig& config, int mtry, uint64_t seed)
      : X_(X), y_(y), n_classes_(n_classes), config_(config), mtry_(mtry), rng_(seed) {}

  Tree build(std::vector<int> root_indices) {
    tree_.nodes.clear();
    grow(std::move(root_indices), 0);
    return std::move(tree_);
  }

 private:
  int make_leaf(const std::vector<double>& counts, double n) {
    TreeNode node;
    node.probs.resize(n_classes_);
    for (int k = 0; k < n_classes_; ++k) node.probs[k] = counts[k] / n;
    tree_.nodes.push_back(std::move(node));
    return static_cast<int>(tree_.nodes.size()) - 1;
  }

  std::vector<int> draw_features() {
    const int f = static_cast<int>(X_[0].size());
    if (mtry_ >= f) {
      std::vector<int> all(f);
      for (int i = 0; i < f; ++i) all[i] = i;
      return all;
    }
    std::vector<int> pool(f);
    for (int i = 0; i < f; ++i) pool[i] = i;
    for (int i = 0; i < mtry_; ++i) {
      int j = i + static_cast<int>(rng_() % static_cast<uint64_t>(f - i));
      std::swap(pool[i], pool[j]);
    }
    pool.resize(mtry_);
    std::sort(pool.begin(), pool.end());
    return pool;
  }

  // Sweeps sorted feature values; candidate thresholds are midpoints
  // between consecutive distinct values. Strict improvement comparison
  // keeps the first minimum, which is the lowest feature index and lowest
  // threshold because both loops run in ascending order.
  SplitChoice best_split(const std::vector<int>& indices, const std::vector<int>& features,
                         const std::vector<double>& total_counts) {
    const double n = static_cast<double>(indices.size());
    SplitChoice best;
    best.score = std::numeric_limits<double>::infinity();
    std::vector<std::pair<double, int>> column(indices.size());
    std::vector<double> left_counts(n_classes_);
    for (int f : features) {
      for (size_t i = 0; i < indices.size(); ++i)
        column[i] = {X_[indices[i]][f], y_[indices[i]]};
      std::sort(column.begin(), column.end(),
                [](const auto& a, const auto& b) { return a.first < b.first; });
      std::fill(left_counts.begin(), left_counts.end(), 0.0);
      for (size_t pos = 1; pos < column.size(); ++pos) {
        left_counts[column[pos - 1].second] += 1.0;
        if (column[pos].first == column[pos - 1].first) continue;
        const double n_left = static_cast<double>(pos);
        const double n_right = n - n_left;
        double right_gini_counts = 0.0;
        double left_gini = gini(left_counts, n_left);
        // right counts = total - left
        double sum_sq = 0.0;
        for (int k = 0; k < n_classes_; ++k) {
          double c = total_counts[k] - left_counts[k];
          double p = c / n_right;
          sum_sq += p * p;
        }
        right_gini_counts = 1.0 - sum_sq;
        double score = (n_left * left_gini + n_right * right_gini_counts) / n;
        if (score < best.score) {
          best.score = score;
          best.feature = f;
          best.threshold = (column[pos - 1].first + column[pos].first) / 2.0;
        }
      }
    }
    return best;
  }

  int grow(std::vector<int> indices, int depth) {
    const double n = static_cast<double>(indices.size());
    std::vector<double> counts(n_classes_, 0.0);
    for (int i : indices) counts[y_[i]] += 1.0;
    bool pure = false;
    for (int k = 0; k < n_classes_; ++k)
      if (counts[k] == n) pure = true;
    if (pure || indices.size() < static_cast<size_t>(config_.min_samples_split) ||
        (config_.max_depth > 0 && depth >= config_.max_depth))
      return make_leaf(counts, n);

    SplitChoice split = best_split(indices, draw_features(), counts);
    if (split.feature < 0) return make_leaf(counts, n);

    std::vector<int> left_idx, right_idx;
    for (int i : indices) {
      if (X_[i][split.feature] <= split.threshold)
        left_idx.push_back(i);
      else
        right_idx.push_back(i);
    }
    indices.clear();
    indices.shrink_to_fit();

    TreeNode node;
    node.feature = split.feature;
    node.threshold = split.threshold;
    tree_.nodes.push_back(std::move(node));
    const int id = static_cast<int>(tree_.nodes.size()) - 1;
    const int left = grow(std::move(left_idx), depth + 1);
    const int right = grow(std::move(right_idx), depth + 1);
    tree_.nodes[id].left = left;
    tree_.nodes[id].right = right;
    return id;
  }

  const std::vector<std::vector<double>>& X_;
  const std::vector<int>& y_;
  const int n_classes_;
  const ForestConfig& config_;
  const int mtry_;
  std::mt19937_64 rng_;
  Tree tree_;
};

const TreeNode& walk(const Tree& tree, const std::vector<double>& x) {
  int id = 0;
  while (tree.nodes[id].feature >= 0) {
    const TreeNode& node = tree.nodes[id];
    id = x[node.feature] <= node.threshold ? node.left : node.right;
  }
  return tree.nodes[id];
}

}  // namespace

Forest Forest::fit(const std::vector<std::vector<double>>& X, const std::vector<int>& y,
                   const ForestConfig& config) {
  if (X.empty()) throw Error(ErrorCode::EmptyInput, "no training rows");
  if (X.size() != y.size())
    throw Error(ErrorCode::LengthMismatch, std::to_string(X.size()) + " rows vs " +
                                               std::to_string(y.size()) + " labels");
  if (config.n_trees < 1 || config.max_depth < 0 || config.min_samples_split < 2 ||
      config.features_per_split < 0)
    throw Error(ErrorCode::BadArgument, "forest config out of range");

  const size_t width = X[0].size();
  if (width == 0) throw Error(ErrorCode::EmptyInput, "zero-width feature vectors");
  int max_label = 0;
  for (size_t i = 0; i < X.size(); ++i) {
    if (X[i].size() != width)
      throw Error(ErrorCode::LengthMismatch, "row " + std::to_string(i) + " has width " +
                                                 std::to_string(X[i].size()) + ", expected " +
                                                 std::to_string(width));
    for (double v : X[i])
      if (std::isnan(v))
        throw Error(ErrorCode::BadArgument, "NaN feature in row " + std::to_string(i));
    if (y[i] < 0) throw Error(ErrorCode::BadArgument, "negative label at row " + std::to_string(i));
    max_label = std::max(max_label, y[i]);
  }

  Forest forest;
  forest.n_classes_ = max_label + 1;
  forest.n_features_ = static_cast<int>(width);
  int mtry = config.features_per_split;
  if (mtry == 0)
    mtry = std::max(1, static_cast<int>(std::sqrt(static_cast<double>(width))));

  std::mt19937_64 master(config.seed);
  std::vector<uint64_t> tree_seeds(config.n_trees);
  for (auto& s : tree_seeds) s = master();

  const int n = static_cast<int>(X.size());
  for (int t = 0; t < config.n_trees; ++t) {
    std::mt19937_64 rng(tree_seeds[t]);
    std::vector<int> indices(n);
    if (config.bootstrap) {
      for (int i = 0; i < n; ++i)
        indices[i] = static_cast<int>(rng() % static_cast<uint64_t>(n));
    } else {
      for (int i = 0; i < n; ++i) indices[i] = i;
    }
    TreeBuilder builder(X, y, forest.n_classes_, config, mtry, rng());
    forest.trees_.push_back(builder.build(std::move(indices)));
  }
  return forest;
}

std::vector<double> Forest::predict_proba(const std::vector<double>& x) const {
  if (static_cast<int>(x.size()) != n_features_)
    throw Error(ErrorCode::DimMismatch, "input width " + std::to_string(x.size()) +
                                            ", forest expects " + std::to_string(n_features_));
  std::vector<double> mean(n_classes_, 0.0);
  for (const Tree& tree : trees_) {
    const TreeNode& leaf = walk(tree, x);
    for (int k = 0; k < n_classes_; ++k) mean[k] += leaf.probs[k];
  }
  const double scale = 1.0 / static_cast<double>(trees_.size());
  for (double& v : mean) v *= scale;
  return mean;
}

int Forest::predict(const std::vector<double>& x) const {
  std::vector<double> probs = predict_proba(x);
  int best = 0;
  for (int k = 1; k < n_classes_; ++k)
    if (probs[k] > probs[best]) best = k;
  return best;
}

std::string Forest::serialize() const {
  std::string out;
  out += "NTRF";
  bytes::put<uint32_t>(out, 1);  // format version
  bytes::put<uint32_t>(out, static_cast<uint32_t>(n_classes_));
  bytes::put<uint32_t>(out, static_cast<uint32_t>(n_features_));
  bytes::put<uint32_t>(out, static_cast<uint32_t>(trees_.size()));
  for (const Tree& tree : trees_) {
    bytes::put<uint32_t>(out, static_cast<uint32_t>(tree.nodes.size()));
    for (const TreeNode& node : tree.nodes) {
      if (node.feature < 0) {
        bytes::put<uint8_t>(out, 0);
        for (double p : node.probs) bytes::put<double>(out, p);
      } else {
        bytes::put<uint8_t>(out, 1);
        bytes::put<int32_t>(out, node.feature);
        bytes::put<double>(out, node.threshold);
        bytes::put<int32_t>(out, node.left);
        bytes::put<int32_t>(out, node.right);
      }
    }
  }
  return out;
}

Forest Forest::deserialize(const std::string& bytes) {
  if (bytes.empty()) throw Error(ErrorCode::EmptyInput, "empty forest payload");
  bytes::Reader in(bytes);
  char magic[4];
  for (char& c : magic) c = in.get<char>();
  if (std::string(magic, 4) != "NTRF")
    throw Error(ErrorCode::BadFormat, "bad forest magic");
  const uint32_t version = in.get<uint32_t>();
  if (version != 1)
    throw Error(ErrorCode::VersionMismatch, "forest format version " + std::to_string(version) +
                                                ", this build reads version 1");
  Forest forest;
  forest.n_classes_ = static_cast<int>(in.get<uint32_t>());
  forest.n_features_ = static_cast<int>(in.get<uint32_t>());
  const uint32_t n_trees = in.get<uint32_t>();
  if (forest.n_classes_ < 1 || forest.n_features_ < 1 || n_trees < 1)
    throw Error(ErrorCode::BadFormat, "bad forest header counts");
  forest.trees_.resize(n_trees);
  for (Tree& tree : forest.trees_) {
    const uint32_t n_nodes = in.get<uint32_t>();
    if (n_nodes < 1) throw Error(ErrorCode::BadFormat, "tree with no nodes");
    tree.nodes.resize(n_nodes);
    for (TreeNode& node : tree.nodes) {
      const uint8_t kind = in.get<uint8_t>();
      if (kind == 0) {
        node.feature = -1;
        node.probs.resize(forest.n_classes_);
        for (double& p : node.probs) p = in.get<double>();
      } else if (kind == 1) {
        node.feature = in.get<int32_t>();
        node.threshold = in.get<double>();
        node.left = in.get<int32_t>();
        node.right = in.get<int32_t>();
        if (node.feature >= forest.n_features_ || node.left < 0 || node.right < 0 ||
            node.left >= static_cast<int>(n_nodes) || node.right >= static_cast<int>(n_nodes))
          throw Error(ErrorCode::BadFormat, "tree node references out of range");
      } else {
        throw Error(ErrorCode::BadFormat, "unknown node kind " + std::to_string(kind));
      }
    }
  }
  if (!in.done()) throw Error(ErrorCode::BadFormat, "trailing bytes after forest payload");
  return forest;
}

}  // namespace normtag::forest
