#pragma once

// Experiment runner: normalization and embedding grids, canonical-subset
// splits, confusion-difference matrices, paired randomization significance,
// and the combined final table. Multi-run cells share seeds by run index so
// systems stay comparable.

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "normtag/corpus.hpp"
#include "normtag/embeddings.hpp"
#include "normtag/normalizer.hpp"
#include "normtag/tagger.hpp"

namespace normtag::harness {

double mean_of(const std::vector<double>& xs);
double population_stdev(const std::vector<double>& xs);

struct RunReport {
  std::string id;
  std::vector<uint64_t> seeds;      // one per run
  std::vector<double> accuracies;   // aligned with seeds
  double mean = 0.0;
  double stdev = 0.0;
  // Per-sentence predicted tags from the first run, kept only on request.
  std::vector<std::vector<std::string>> first_run_predictions;
};

RunReport finish_report(std::string id, std::vector<uint64_t> seeds, std::vector<double> accs);

// Train on `train` and evaluate on `eval_set` once per run; run r uses seed
// base_seed + r. jobs > 1 spreads runs over a thread pool (results are
// positional, so scheduling cannot change them).
RunReport run_cell(const std::string& id, const corpus::Dataset& train,
                   const corpus::Dataset& eval_set, const corpus::TagSet& tags,
                   const tagger::TaggerConfig& config, int runs, uint64_t base_seed,
                   const embeddings::EmbeddingMatrix* pretrained = nullptr,
                   bool keep_predictions = false, int jobs = 1);

enum class TrainVariant { kRaw, kAll, kUnion };
std::string variant_name(TrainVariant v);

struct NormGrid {
  std::vector<TrainVariant> variants;         // rows
  std::vector<normalizer::NormMode> modes;    // columns (kNone = raw test)
  std::vector<std::vector<RunReport>> cells;  // [variant][mode]
  std::string tsv() const;
};

// Rows: tagger trained on raw, ALL-normalized, or union training data.
// Columns: evaluation text normalized under each test-time mode, with
// "unknown" judged against that row's training vocabulary.
NormGrid run_norm_grid(const corpus::Dataset& train, const corpus::Dataset& eval_set,
                       const normalizer::NormalizerModel& model, const corpus::TagSet& tags,
                       const tagger::TaggerConfig& config, int runs, uint64_t base_seed,
                       int jobs = 1);

struct EmbedCell {
  bool structured = false;
  int window = 1;
  RunReport report;
};

struct EmbedGrid {
  std::vector<EmbedCell> cells;  // plain/structured x window 1/5
  std::string tsv() const;
};

// Embeddings are trained once per cell at the tagger's word_dim and used to
// initialize the word table of every run in that cell.
EmbedGrid run_embed_grid(const std::vector<std::vector<std::string>>& emb_corpus,
                         const corpus::Dataset& train, const corpus::Dataset& eval_set,
                         const corpus::TagSet& tags, const tagger::TaggerConfig& config,
                         embeddings::EmbeddingConfig emb_config, int runs, uint64_t base_seed,
                         int jobs = 1);

struct CanonicalSplit {
  uint64_t canonical_total = 0;
  uint64_t canonical_correct = 0;
  uint64_t noncanonical_total = 0;
  uint64_t noncanonical_correct = 0;

  std::optional<double> acc_canonical() const;
  std::optional<double> acc_noncanonical() const;  // absent when no such tokens
  double fraction_noncanonical() const;
  double overall() const;
};

// A token is non-canonical iff gold_norm differs from raw (case-sensitive).
CanonicalSplit canonical_split_eval(const std::vector<std::vector<std::string>>& predictions,
                                    const corpus::Dataset& gold);

struct ConfusionDiff {
  corpus::TagSet tags;
  std::vector<std::vector<int64_t>> cells;  // [gold][predicted], diagonal zero
  std::string tsv() const;
};

// errors(A) - errors(B) per (gold, predicted) pair; correct predictions are
// not counted, so the diagonal stays zero.
ConfusionDiff confusion_diff(const std::vector<std::vector<std::string>>& preds_a,
                             const std::vector<std::vector<std::string>>& preds_b,
                             const corpus::Dataset& gold, const corpus::TagSet& tags);

// Paired approximate randomization over sentences: each round flips every
// sentence's (A,B) correct-count pair with probability 1/2; the statistic is
// the absolute accuracy difference. p = (1 + #{rounds with statistic >=
// observed}) / (rounds + 1). Counts are integers, so the comparison is exact.
double significance(const std::vector<std::vector<std::string>>& preds_a,
                    const std::vector<std::vector<std::string>>& preds_b,
                    const corpus::Dataset& gold, int rounds, uint64_t seed);

struct FinalReport {
  std::vector<std::string> systems;           // baseline, +norm, +embeds, +comb
  std::vector<std::string> eval_names;
  std::vector<std::vector<RunReport>> cells;  // [system][eval set]
  std::vector<double> p_embeds_vs_comb;       // one per eval set, run-0 predictions
  std::vector<std::string> notes;             // informational full-data reference comparisons
  std::string to_json() const;
  std::string to_tsv() const;
};

// baseline = raw train, raw text; +norm = test text normalized with mode
// ALL; +embeds = structured window-1 embedding init; +comb = both.
FinalReport run_final(const corpus::Dataset& train,
                      const std::vector<std::pair<std::string, corpus::Dataset>>& eval_sets,
                      const normalizer::NormalizerModel& norm_model,
                      const std::vector<std::vector<std::string>>& emb_corpus,
                      const corpus::TagSet& tags, const tagger::TaggerConfig& config,
                      embeddings::EmbeddingConfig emb_config, int runs, uint64_t base_seed,
                      int significance_rounds, int jobs = 1);

}  // namespace normtag::harness
