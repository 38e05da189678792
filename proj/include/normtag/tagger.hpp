#pragma once

// Bi-directional LSTM POS tagger over word + character embeddings, trained
// from scratch with per-sentence Adam updates. Character tokens run through
// their own bi-LSTM whose final states are concatenated onto the word
// embedding; Gaussian input noise regularizes training only.

#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "normtag/corpus.hpp"
#include "normtag/embeddings.hpp"

namespace normtag::tagger {

struct TaggerConfig {
  int epochs = 10;
  int layers = 1;
  int word_dim = 100;
  int char_dim = 256;  // char embedding size and char bi-LSTM hidden size
  int word_hidden = 100;
  double noise_sigma = 0.2;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  bool update_embeddings = true;  // false freezes the word table
  uint64_t seed = 1;
  int unk_threshold = 1;  // words seen fewer times map to UNK
};

// Gate weights packed as [input; forget; cell; output], 4H rows. Biases are
// one-column matrices so every parameter shares one tensor type.
struct LstmParams {
  Eigen::MatrixXd W;  // 4H x input_dim
  Eigen::MatrixXd U;  // 4H x H
  Eigen::MatrixXd b;  // 4H x 1
};

struct TaggerModel {
  TaggerConfig config;
  corpus::TagSet tags;
  std::vector<std::string> vocab_words;  // row i+1 of word_table; row 0 is UNK
  std::unordered_map<std::string, int> word_index;
  std::vector<unsigned char> char_list;  // row i+1 of char_table; row 0 is UNK
  int char_index[256];

  Eigen::MatrixXd word_table;  // (|V|+1) x word_dim
  Eigen::MatrixXd char_table;  // (|C|+1) x char_dim
  LstmParams char_fwd, char_bwd;
  std::vector<LstmParams> word_fwd, word_bwd;  // one per layer
  Eigen::MatrixXd out_w;  // |tags| x 2*word_hidden
  Eigen::MatrixXd out_b;  // |tags| x 1

  int word_id(const std::string& word) const;
  int char_id(unsigned char c) const { return char_index[c]; }
};

// All parameter tensors in a fixed order (word_table first); gradients,
// Adam state, and serialization walk the same order.
std::vector<Eigen::MatrixXd*> tensors(TaggerModel& model);
std::vector<const Eigen::MatrixXd*> tensors(const TaggerModel& model);

using Gradients = std::vector<Eigen::MatrixXd>;  // aligned with tensors()

// Parameters init uniformly in [-0.1, 0.1] from config.seed; rows of
// pretrained vectors override word-table rows for words in both vocabed
// sets. train_vocab carries counts so unk_threshold can filter.
TaggerModel init(const TaggerConfig& config, const corpus::TagSet& tags,
                 const std::unordered_map<std::string, uint64_t>& train_vocab,
                 const embeddings::EmbeddingMatrix* pretrained = nullptr);

// Per-token log-probability rows (length x |tags|); no noise.
Eigen::MatrixXd forward(const TaggerModel& model, const std::vector<std::string>& tokens);

// Mean per-token cross-entropy and dense gradients for every tensor.
// noise_rng enables Gaussian input noise (training); null disables it.
double loss_and_grads(const TaggerModel& model, const corpus::Sentence& sentence, Gradients& grads,
                      std::mt19937_64* noise_rng = nullptr);

struct TrainStats {
  std::vector<double> epoch_mean_loss;
};

// Seeded-shuffle epochs with Adam on every tensor (word table only when
// config.update_embeddings). Pure function of (model, data, seed).
TaggerModel train(TaggerModel model, const corpus::Dataset& data, TrainStats* stats = nullptr);

// Argmax tags; ties go to the lowest tag index.
std::vector<std::string> tag(const TaggerModel& model, const std::vector<std::string>& tokens);

// Token-level accuracy against gold_pos.
double evaluate(const TaggerModel& model, const corpus::Dataset& data);

// Versioned binary round trip (config, vocabularies, tensors).
std::string save(const TaggerModel& model);
TaggerModel load(const std::string& bytes);

}  // namespace normtag::tagger
