#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace normtag::embeddings {

struct EmbeddingConfig {
  int dim = 100;
  int window = 1;
  int negatives = 5;
  double subsample = 1e-4;
  int epochs = 5;
  int min_count = 1;
  bool structured = false;
  double learning_rate = 0.025;
  uint64_t seed = 1;
  int workers = 1;  // >1 runs lock-free updates and forfeits determinism
};

// Vocabulary-indexed dense vectors. Input vectors are |V| x dim; output
// vectors are |V| x dim (plain) or |V| x 2*window*dim (structured, one block
// per signed relative position).
struct EmbeddingMatrix {
  std::vector<std::string> words;
  std::unordered_map<std::string, int> index;
  int dim = 0;
  bool structured = false;
  int window = 1;
  std::vector<float> input;   // row-major |V| x dim
  std::vector<float> output;  // row-major |V| x out_dim()

  int out_dim() const { return structured ? 2 * window * dim : dim; }
  int size() const { return static_cast<int>(words.size()); }
  bool contains(const std::string& word) const { return index.count(word) > 0; }
  const float* input_row(int i) const { return input.data() + static_cast<size_t>(i) * dim; }
};

// Output-block offset for a context at signed relative position d != 0.
inline int position_block(int d, int window) { return d < 0 ? d + window : window + d - 1; }

// Negative-sampling pair loss -log sigmoid((2*label-1) * dot) and its
// derivative w.r.t. the dot product (sigmoid(dot) - label). Training and the
// gradient tests share this one implementation.
struct PairLoss {
  double loss;
  double dloss_ddot;
};
PairLoss sgns_pair(double dot, int label);

struct TrainStats {
  std::vector<double> epoch_mean_loss;  // mean per-pair loss, one entry per epoch
  uint64_t pairs_total = 0;
};

// Skip-gram with negative sampling; deterministic for workers == 1.
// stats is filled only in single-worker mode.
EmbeddingMatrix train(const std::vector<std::vector<std::string>>& corpus,
                      const EmbeddingConfig& config, TrainStats* stats = nullptr);

// Top-k cosine neighbors over input vectors, excluding the query itself.
// Ties break lexicographically; OOV queries yield an empty list.
std::vector<std::pair<std::string, double>> nearest(const EmbeddingMatrix& emb,
                                                    const std::string& word, int k);

// word2vec text format: header "<V> <dim>", then one word + dim values per
// line. Output vectors follow in a "#output" sidecar section.
std::string save(const EmbeddingMatrix& emb);
EmbeddingMatrix load(const std::string& text);

}  // namespace normtag::embeddings
