#pragma once

// Candidate ranking and sentence normalization. A binary random forest
// scores each (token, candidate) pair from a fixed feature schema; test-time
// modes control which tokens are eligible for replacement.

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "normtag/corpus.hpp"
#include "normtag/embeddings.hpp"
#include "normtag/forest.hpp"
#include "normtag/lexgen.hpp"
#include "normtag/ngram.hpp"

namespace normtag::normalizer {

enum class NormMode { kNone, kUnk, kAll, kGoldEd, kGold };

NormMode mode_from_string(const std::string& name);  // none|unk|all|golded|gold
std::string mode_name(NormMode mode);

// Read-only resources the ranker draws features from.
struct Resources {
  lexgen::Dictionary dict;
  lexgen::LookupList lookup;
  embeddings::EmbeddingMatrix emb;       // may be empty (no embedding evidence)
  ngram::NgramModel canonical;           // canonical-text statistics
  ngram::NgramModel tweets;              // raw-tweet statistics
  lexgen::GenConfig gen;
};

// Feature schema, in order. Missing values are kMissingValue with the
// companion *_present flag at 0.
inline constexpr int kFeatureCount = 22;
inline constexpr double kMissingValue = -1e6;
inline constexpr int kSchemaVersion = 1;
const std::vector<std::string>& feature_names();

std::vector<double> featurize(const lexgen::Candidate& candidate, size_t token_index,
                              const corpus::Sentence& sentence, const Resources& res);

lexgen::CandidateSet candidates_for_token(const std::string& raw, const Resources& res);

struct NormalizerModel {
  Resources res;
  forest::Forest ranker;
  int schema_version = kSchemaVersion;
};

struct TrainSummary {
  size_t tokens = 0;
  size_t covered_tokens = 0;  // gold form appeared among the candidates
  size_t instances = 0;
  size_t positives = 0;
  double coverage() const { return tokens ? static_cast<double>(covered_tokens) / tokens : 0.0; }
};

// One binary instance per (token, candidate); label 1 iff the candidate
// matches gold_norm case-insensitively. Throws when no positive instance
// exists, reporting the candidate coverage rate.
NormalizerModel train(const corpus::Dataset& training, Resources res,
                      const forest::ForestConfig& forest_config, TrainSummary* summary = nullptr);

// Replaces eligible token forms; sentence length and gold layers are
// preserved. A chosen candidate is emitted lowercase except ORIGINAL, which
// keeps the raw form verbatim. "Unknown" means the token (verbatim or
// lowercased) is absent from train_vocab and the dictionary.
corpus::Sentence normalize(const corpus::Sentence& sentence, const NormalizerModel& model,
                           NormMode mode,
                           const std::unordered_map<std::string, uint64_t>& train_vocab);

corpus::Dataset normalize_dataset(const corpus::Dataset& data, const NormalizerModel& model,
                                  NormMode mode,
                                  const std::unordered_map<std::string, uint64_t>& train_vocab);

// Model directory layout: dict.txt, lookup.tsv, embeddings.vec,
// ngram_canonical.txt, ngram_tweets.txt, forest.bin, meta.kv.
void save(const NormalizerModel& model, const std::string& dir);
NormalizerModel load(const std::string& dir);

}  // namespace normtag::normalizer
