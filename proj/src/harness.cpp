#include "normtag/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <functional>
#include <mutex>
#include <random>
#include <thread>

#include "json.hpp"
#include "normtag/error.hpp"

namespace normtag::harness {

namespace {

using json = nlohmann::json;

// Positional work pool: results land by index, so thread scheduling cannot
// reorder anything. The first exception wins and is rethrown after join.
void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  if (jobs <= 1 || n <= 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::mutex error_mu;
  std::exception_ptr error;
  std::vector<std::thread> threads;
  const int workers = std::min(jobs, n);
  for (int t = 0; t < workers; ++t) {
    threads.emplace_back([&] {
      while (true) {
        const int i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mu);
          if (!error) error = std::current_exception();
          return;
        }
      }
    });
  }
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);
}

std::string format_cell(double mean, double stdev) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.4f±%.4f", mean, stdev);
  return buf;
}

void check_alignment(const std::vector<std::vector<std::string>>& preds,
                     const corpus::Dataset& gold, const std::string& who) {
  if (preds.size() != gold.sentences.size())
    throw Error(ErrorCode::LengthMismatch, who + ": " + std::to_string(preds.size()) +
                                               " prediction sentences vs " +
                                               std::to_string(gold.sentences.size()) + " gold");
  for (size_t i = 0; i < preds.size(); ++i)
    if (preds[i].size() != gold.sentences[i].tokens.size())
      throw Error(ErrorCode::LengthMismatch,
                  who + ": sentence " + std::to_string(i) + " has " +
                      std::to_string(preds[i].size()) + " predictions vs " +
                      std::to_string(gold.sentences[i].tokens.size()) + " tokens");
}

}  // namespace

double mean_of(const std::vector<double>& xs) {
  double sum = 0.0;
  for (double x : xs) sum += x;
  return xs.empty() ? 0.0 : sum / static_cast<double>(xs.size());
}

double population_stdev(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  const double mean = mean_of(xs);
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return std::sqrt(var / static_cast<double>(xs.size()));
}

RunReport finish_report(std::string id, std::vector<uint64_t> seeds, std::vector<double> accs) {
  RunReport report;
  report.id = std::move(id);
  report.seeds = std::move(seeds);
  report.accuracies = std::move(accs);
  report.mean = mean_of(report.accuracies);
  report.stdev = population_stdev(report.accuracies);
  return report;
}

RunReport run_cell(const std::string& id, const corpus::Dataset& train,
                   const corpus::Dataset& eval_set, const corpus::TagSet& tags,
                   const tagger::TaggerConfig& config, int runs, uint64_t base_seed,
                   const embeddings::EmbeddingMatrix* pretrained, bool keep_predictions,
                   int jobs) {
  if (runs < 1) throw Error(ErrorCode::BadArgument, "runs must be >= 1");
  const auto vocab_map = corpus::vocab(train, 1);
  std::vector<double> accs(runs);
  std::vector<uint64_t> seeds(runs);
  std::vector<std::vector<std::string>> predictions;
  parallel_for(runs, jobs, [&](int r) {
    tagger::TaggerConfig run_config = config;
    run_config.seed = base_seed + static_cast<uint64_t>(r);
    seeds[r] = run_config.seed;
    tagger::TaggerModel model =
        tagger::train(tagger::init(run_config, tags, vocab_map, pretrained), train);
    accs[r] = tagger::evaluate(model, eval_set);
    if (keep_predictions && r == 0) {
      std::vector<std::vector<std::string>> preds;
      for (const auto& sentence : eval_set.sentences) {
        std::vector<std::string> tokens;
        for (const auto& token : sentence.tokens) tokens.push_back(token.raw);
        preds.push_back(tagger::tag(model, tokens));
      }
      predictions = std::move(preds);
    }
  });
  RunReport report = finish_report(id, std::move(seeds), std::move(accs));
  report.first_run_predictions = std::move(predictions);
  return report;
}

std::string variant_name(TrainVariant v) {
  switch (v) {
    case TrainVariant::kRaw: return "raw";
    case TrainVariant::kAll: return "all";
    case TrainVariant::kUnion: return "union";
  }
  return "?";
}

std::string NormGrid::tsv() const {
  std::string out = "train\\test";
  for (auto mode : modes) out += "\t" + normalizer::mode_name(mode);
  out += "\n";
  for (size_t v = 0; v < variants.size(); ++v) {
    out += variant_name(variants[v]);
    for (size_t m = 0; m < modes.size(); ++m)
      out += "\t" + format_cell(cells[v][m].mean, cells[v][m].stdev);
    out += "\n";
  }
  return out;
}

NormGrid run_norm_grid(const corpus::Dataset& train, const corpus::Dataset& eval_set,
                       const normalizer::NormalizerModel& model, const corpus::TagSet& tags,
                       const tagger::TaggerConfig& config, int runs, uint64_t base_seed,
                       int jobs) {
  if (runs < 1) throw Error(ErrorCode::BadArgument, "runs must be >= 1");
  NormGrid grid;
  grid.variants = {TrainVariant::kRaw, TrainVariant::kAll, TrainVariant::kUnion};
  grid.modes = {normalizer::NormMode::kNone, normalizer::NormMode::kUnk,
                normalizer::NormMode::kAll, normalizer::NormMode::kGoldEd,
                normalizer::NormMode::kGold};

  const auto raw_vocab = corpus::vocab(train, 1);
  corpus::Dataset train_all =
      normalizer::normalize_dataset(train, model, normalizer::NormMode::kAll, raw_vocab);
  corpus::Dataset train_union = train;
  for (const auto& sentence : train_all.sentences) {
    corpus::Sentence copy = sentence;
    copy.id += "+all";
    train_union.sentences.push_back(std::move(copy));
  }

  for (TrainVariant variant : grid.variants) {
    const corpus::Dataset& vtrain = variant == TrainVariant::kRaw   ? train
                                    : variant == TrainVariant::kAll ? train_all
                                                                    : train_union;
    const auto vocab_map = corpus::vocab(vtrain, 1);
    std::vector<corpus::Dataset> mode_evals;
    for (auto mode : grid.modes)
      mode_evals.push_back(normalizer::normalize_dataset(eval_set, model, mode, vocab_map));

    // One training per run, evaluated across all five test modes.
    std::vector<std::vector<double>> accs(grid.modes.size(), std::vector<double>(runs));
    std::vector<uint64_t> seeds(runs);
    parallel_for(runs, jobs, [&](int r) {
      tagger::TaggerConfig run_config = config;
      run_config.seed = base_seed + static_cast<uint64_t>(r);
      seeds[r] = run_config.seed;
      tagger::TaggerModel tm =
          tagger::train(tagger::init(run_config, tags, vocab_map, nullptr), vtrain);
      for (size_t m = 0; m < mode_evals.size(); ++m) accs[m][r] = tagger::evaluate(tm, mode_evals[m]);
    });

    std::vector<RunReport> row;
    for (size_t m = 0; m < grid.modes.size(); ++m)
      row.push_back(finish_report(variant_name(variant) + "/" + normalizer::mode_name(grid.modes[m]),
                                  seeds, accs[m]));
    grid.cells.push_back(std::move(row));
  }
  return grid;
}

std::string EmbedGrid::tsv() const {
  std::string out = "variant\twindow\tmean\tstdev\truns\n";
  for (const auto& cell : cells) {
    out += cell.structured ? "structured" : "plain";
    out += "\t" + std::to_string(cell.window);
    char buf[64];
    std::snprintf(buf, sizeof(buf), "\t%.4f\t%.4f", cell.report.mean, cell.report.stdev);
    out += buf;
    out += "\t" + std::to_string(cell.report.accuracies.size()) + "\n";
  }
  return out;
}

EmbedGrid run_embed_grid(const std::vector<std::vector<std::string>>& emb_corpus,
                         const corpus::Dataset& train, const corpus::Dataset& eval_set,
                         const corpus::TagSet& tags, const tagger::TaggerConfig& config,
                         embeddings::EmbeddingConfig emb_config, int runs, uint64_t base_seed,
                         int jobs) {
  EmbedGrid grid;
  emb_config.dim = config.word_dim;
  for (bool structured : {false, true}) {
    for (int window : {1, 5}) {
      embeddings::EmbeddingConfig cell_config = emb_config;
      cell_config.structured = structured;
      cell_config.window = window;
      embeddings::EmbeddingMatrix emb = embeddings::train(emb_corpus, cell_config);
      EmbedCell cell;
      cell.structured = structured;
      cell.window = window;
      const std::string id =
          std::string(structured ? "structured" : "plain") + "-w" + std::to_string(window);
      cell.report = run_cell(id, train, eval_set, tags, config, runs, base_seed, &emb, false, jobs);
      grid.cells.push_back(std::move(cell));
    }
  }
  return grid;
}

std::optional<double> CanonicalSplit::acc_canonical() const {
  if (canonical_total == 0) return std::nullopt;
  return static_cast<double>(canonical_correct) / static_cast<double>(canonical_total);
}

std::optional<double> CanonicalSplit::acc_noncanonical() const {
  if (noncanonical_total == 0) return std::nullopt;
  return static_cast<double>(noncanonical_correct) / static_cast<double>(noncanonical_total);
}

double CanonicalSplit::fraction_noncanonical() const {
  const uint64_t total = canonical_total + noncanonical_total;
  return total ? static_cast<double>(noncanonical_total) / static_cast<double>(total) : 0.0;
}

double CanonicalSplit::overall() const {
  const uint64_t total = canonical_total + noncanonical_total;
  return total ? static_cast<double>(canonical_correct + noncanonical_correct) /
                     static_cast<double>(total)
               : 0.0;
}

CanonicalSplit canonical_split_eval(const std::vector<std::vector<std::string>>& predictions,
                                    const corpus::Dataset& gold) {
  check_alignment(predictions, gold, "canonical split");
  CanonicalSplit split;
  for (size_t i = 0; i < predictions.size(); ++i) {
    const auto& sentence = gold.sentences[i];
    for (size_t t = 0; t < sentence.tokens.size(); ++t) {
      const auto& token = sentence.tokens[t];
      if (!token.gold_pos || !token.gold_norm)
        throw Error(ErrorCode::MissingLayer,
                    "canonical split needs gold tags and gold normalization on sentence " +
                        sentence.id);
      const bool correct = predictions[i][t] == *token.gold_pos;
      if (*token.gold_norm != token.raw) {
        split.noncanonical_total += 1;
        split.noncanonical_correct += correct ? 1 : 0;
      } else {
        split.canonical_total += 1;
        split.canonical_correct += correct ? 1 : 0;
      }
    }
  }
  return split;
}

std::string ConfusionDiff::tsv() const {
  std::string out = "gold\\pred";
  for (const auto& label : tags.labels()) out += "\t" + label;
  out += "\n";
  for (int g = 0; g < tags.size(); ++g) {
    out += tags.label(g);
    for (int p = 0; p < tags.size(); ++p) out += "\t" + std::to_string(cells[g][p]);
    out += "\n";
  }
  return out;
}

ConfusionDiff confusion_diff(const std::vector<std::vector<std::string>>& preds_a,
                             const std::vector<std::vector<std::string>>& preds_b,
                             const corpus::Dataset& gold, const corpus::TagSet& tags) {
  check_alignment(preds_a, gold, "confusion diff (A)");
  check_alignment(preds_b, gold, "confusion diff (B)");
  ConfusionDiff diff;
  diff.tags = tags;
  diff.cells.assign(tags.size(), std::vector<int64_t>(tags.size(), 0));
  for (size_t i = 0; i < gold.sentences.size(); ++i) {
    const auto& sentence = gold.sentences[i];
    for (size_t t = 0; t < sentence.tokens.size(); ++t) {
      if (!sentence.tokens[t].gold_pos)
        throw Error(ErrorCode::MissingLayer, "confusion diff needs gold tags");
      const int g = tags.index_of(*sentence.tokens[t].gold_pos);
      const int pa = tags.index_of(preds_a[i][t]);
      const int pb = tags.index_of(preds_b[i][t]);
      if (pa != g) diff.cells[g][pa] += 1;
      if (pb != g) diff.cells[g][pb] -= 1;
    }
  }
  return diff;
}

double significance(const std::vector<std::vector<std::string>>& preds_a,
                    const std::vector<std::vector<std::string>>& preds_b,
                    const corpus::Dataset& gold, int rounds, uint64_t seed) {
  if (rounds < 1) throw Error(ErrorCode::BadArgument, "rounds must be >= 1");
  check_alignment(preds_a, gold, "significance (A)");
  check_alignment(preds_b, gold, "significance (B)");

  // Per-sentence correct-count difference; integer arithmetic keeps the
  // >= comparison exact.
  std::vector<int64_t> diffs;
  int64_t observed = 0;
  for (size_t i = 0; i < gold.sentences.size(); ++i) {
    const auto& sentence = gold.sentences[i];
    int64_t d = 0;
    for (size_t t = 0; t < sentence.tokens.size(); ++t) {
      if (!sentence.tokens[t].gold_pos)
        throw Error(ErrorCode::MissingLayer, "significance needs gold tags");
      const auto& g = *sentence.tokens[t].gold_pos;
      d += (preds_a[i][t] == g ? 1 : 0) - (preds_b[i][t] == g ? 1 : 0);
    }
    diffs.push_back(d);
    observed += d;
  }
  observed = std::abs(observed);

  std::mt19937_64 rng(seed);
  int64_t hits = 0;
  for (int round = 0; round < rounds; ++round) {
    int64_t s = 0;
    for (int64_t d : diffs) s += (rng() & 1) ? -d : d;
    if (std::abs(s) >= observed) ++hits;
  }
  return (1.0 + static_cast<double>(hits)) / (static_cast<double>(rounds) + 1.0);
}

std::string FinalReport::to_json() const {
  json j;
  j["systems"] = systems;
  j["eval_sets"] = eval_names;
  j["cells"] = json::array();
  for (size_t s = 0; s < systems.size(); ++s) {
    for (size_t e = 0; e < eval_names.size(); ++e) {
      const RunReport& r = cells[s][e];
      j["cells"].push_back({{"system", systems[s]},
                            {"eval", eval_names[e]},
                            {"mean", r.mean},
                            {"stdev", r.stdev},
                            {"accuracies", r.accuracies},
                            {"seeds", r.seeds}});
    }
  }
  j["p_embeds_vs_comb"] = json::object();
  for (size_t e = 0; e < eval_names.size(); ++e)
    j["p_embeds_vs_comb"][eval_names[e]] = p_embeds_vs_comb[e];
  j["notes"] = notes;
  return j.dump(2) + "\n";
}

std::string FinalReport::to_tsv() const {
  std::string out = "system";
  for (const auto& name : eval_names) out += "\t" + name;
  out += "\n";
  for (size_t s = 0; s < systems.size(); ++s) {
    out += systems[s];
    for (size_t e = 0; e < eval_names.size(); ++e)
      out += "\t" + format_cell(cells[s][e].mean, cells[s][e].stdev);
    out += "\n";
  }
  out += "p(+embeds vs +comb)";
  for (double p : p_embeds_vs_comb) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "\t%.4f", p);
    out += buf;
  }
  out += "\n";
  return out;
}

FinalReport run_final(const corpus::Dataset& train,
                      const std::vector<std::pair<std::string, corpus::Dataset>>& eval_sets,
                      const normalizer::NormalizerModel& norm_model,
                      const std::vector<std::vector<std::string>>& emb_corpus,
                      const corpus::TagSet& tags, const tagger::TaggerConfig& config,
                      embeddings::EmbeddingConfig emb_config, int runs, uint64_t base_seed,
                      int significance_rounds, int jobs) {
  if (eval_sets.empty()) throw Error(ErrorCode::EmptyInput, "no evaluation sets");

  emb_config.dim = config.word_dim;
  emb_config.structured = true;
  emb_config.window = 1;
  embeddings::EmbeddingMatrix emb = embeddings::train(emb_corpus, emb_config);
  const auto raw_vocab = corpus::vocab(train, 1);

  FinalReport report;
  report.systems = {"baseline", "+norm", "+embeds", "+comb"};
  for (const auto& [name, data] : eval_sets) report.eval_names.push_back(name);
  report.cells.assign(report.systems.size(), {});

  for (const auto& [name, data] : eval_sets) {
    corpus::Dataset norm_eval =
        normalizer::normalize_dataset(data, norm_model, normalizer::NormMode::kAll, raw_vocab);

    RunReport baseline = run_cell("baseline/" + name, train, data, tags, config, runs, base_seed,
                                  nullptr, false, jobs);
    RunReport plus_norm = run_cell("+norm/" + name, train, norm_eval, tags, config, runs,
                                   base_seed, nullptr, false, jobs);
    RunReport plus_embeds = run_cell("+embeds/" + name, train, data, tags, config, runs,
                                     base_seed, &emb, true, jobs);
    RunReport plus_comb = run_cell("+comb/" + name, train, norm_eval, tags, config, runs,
                                   base_seed, &emb, true, jobs);

    report.p_embeds_vs_comb.push_back(significance(plus_embeds.first_run_predictions,
                                                   plus_comb.first_run_predictions, data,
                                                   significance_rounds, base_seed));
    report.cells[0].push_back(std::move(baseline));
    report.cells[1].push_back(std::move(plus_norm));
    report.cells[2].push_back(std::move(plus_embeds));
    report.cells[3].push_back(std::move(plus_comb));
  }

  // Informational comparisons against full-data reference accuracies; these
  // need the original corpora to be reproduced, so they are never failures.
  struct Ref {
    const char* system;
    const char* eval;
    double value;
  };
  const Ref refs[] = {{"baseline", "dev", 0.8216},
                      {"+embeds", "dev", 0.8851},
                      {"+embeds", "test_l", 0.8853},
                      {"+comb", "test_l", 0.8963}};
  for (const Ref& ref : refs) {
    for (size_t s = 0; s < report.systems.size(); ++s) {
      if (report.systems[s] != ref.system) continue;
      for (size_t e = 0; e < report.eval_names.size(); ++e) {
        if (report.eval_names[e] != ref.eval) continue;
        char buf[160];
        std::snprintf(buf, sizeof(buf),
                      "[reference] %s on %s: this run %.4f, full-data reference %.4f",
                      ref.system, ref.eval, report.cells[s][e].mean, ref.value);
        report.notes.push_back(buf);
      }
    }
  }
  return report;
}

}  // namespace normtag::harness
