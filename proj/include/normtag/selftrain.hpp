#pragma once

// Iterative indelible self-training over a raw tweet pool, plus the
// gold-data learning-curve experiment. Sampling strategies pick which pool
// tweets get pseudo-labeled each round; added tweets are never removed or
// relabeled, and the tagger retrains from scratch every iteration.

#include <cstdint>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "normtag/corpus.hpp"
#include "normtag/tagger.hpp"

namespace normtag::selftrain {

enum class Strategy { kRandom, kDevUnknown, kWithNe, kWithoutNe };

Strategy strategy_from_string(const std::string& name);  // random|dev-unknown|with-ne|without-ne
std::string strategy_name(Strategy s);

// Heuristic entity flag per tweet: some non-initial token has an uppercase
// first letter and all-lowercase remainder and is none of <URL>,
// <USERNAME>, rt. A crude stand-in for a real recognizer; masks can also be
// loaded from a file (one 0/1 line per pool tweet).
std::vector<bool> heuristic_entity_mask(const std::vector<std::vector<std::string>>& pool);
std::vector<bool> parse_entity_mask(const std::string& text);
std::string write_entity_mask(const std::vector<bool>& mask);

struct SampleConfig {
  Strategy strategy = Strategy::kRandom;
  uint64_t seed = 1;
  // DEV_UNKNOWN: a tweet is eligible when it contains a word present in
  // dev_vocab but absent from train_vocab.
  const std::unordered_map<std::string, uint64_t>* dev_vocab = nullptr;
  const std::unordered_map<std::string, uint64_t>* train_vocab = nullptr;
  // NE strategies: one flag per pool tweet.
  const std::vector<bool>* entity_mask = nullptr;
};

struct SampleResult {
  std::vector<std::vector<std::string>> selected;   // in pool order
  std::vector<std::vector<std::string>> remaining;  // pool minus selected, order kept
  std::vector<size_t> selected_indices;             // into the given pool, ascending
  bool exhausted = false;                           // fewer eligible than requested
};

// Uniform seeded draw of n tweets from the strategy-eligible subset,
// without replacement. selected and remaining partition the pool.
SampleResult sample(const std::vector<std::vector<std::string>>& pool, const SampleConfig& config,
                    size_t n);

struct SelfTrainConfig {
  int iterations = 10;
  size_t per_iteration = 100;
  SampleConfig sampling;
};

struct SelfTrainResult {
  std::vector<std::pair<int, double>> accuracy_by_iteration;  // (0, baseline) first
  size_t final_train_size = 0;                                // sentences
  bool pool_exhausted = false;
  // Initial sentences followed by pseudo-labeled ones in insertion order;
  // labels assigned in earlier iterations are never rewritten.
  corpus::Dataset final_train;
};

// Iteration 0 trains on initial_train alone. Each later iteration samples
// from the pool, tags the sample with the current model, appends the
// pseudo-labeled tweets, and retrains from scratch with the same tagger
// seed. Stops early when the pool runs out of eligible tweets.
SelfTrainResult self_train(const corpus::Dataset& initial_train,
                           std::vector<std::vector<std::string>> pool,
                           const SelfTrainConfig& config, const tagger::TaggerConfig& tagger_config,
                           const corpus::TagSet& tags, const corpus::Dataset& eval_set,
                           const embeddings::EmbeddingMatrix* pretrained = nullptr);

struct CurvePoint {
  double fraction = 0.0;
  size_t sentences = 0;
  std::vector<double> run_accuracies;
  double mean = 0.0;
  double stdev = 0.0;  // population stdev over runs
};

// Per run r (seed = config.seed + r): seeded shuffle, keep the first
// ceil(fraction * N) sentences restored to corpus order, train, evaluate.
// Fraction 1.0 therefore reproduces a plain train+evaluate run.
std::vector<CurvePoint> learning_curve(const corpus::Dataset& train,
                                       const std::vector<double>& fractions, int runs,
                                       const tagger::TaggerConfig& tagger_config,
                                       const corpus::TagSet& tags,
                                       const corpus::Dataset& eval_set);

}  // namespace normtag::selftrain
