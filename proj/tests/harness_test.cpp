#include <cmath>
#include <cstdlib>
#include <random>

#include "doctest.h"
#include "normtag/error.hpp"
#include "normtag/harness.hpp"
#include "testutil.hpp"

using namespace normtag;

namespace {

tagger::TaggerConfig tiny_config() {
  tagger::TaggerConfig config;
  config.word_dim = 4;
  config.char_dim = 3;
  config.word_hidden = 4;
  config.epochs = 2;
  config.seed = 5;
  return config;
}

// Gold tags plus predictions that deliberately miss at chosen positions.
std::vector<std::vector<std::string>> predictions_with_errors(
    const corpus::Dataset& gold, const std::vector<std::pair<size_t, size_t>>& misses,
    const std::string& wrong_tag) {
  std::vector<std::vector<std::string>> preds;
  for (const auto& sentence : gold.sentences) {
    std::vector<std::string> row;
    for (const auto& token : sentence.tokens) row.push_back(*token.gold_pos);
    preds.push_back(std::move(row));
  }
  for (auto [s, t] : misses) preds[s][t] = wrong_tag;
  return preds;
}

}  // namespace

TEST_CASE("mean and population stdev have their textbook values") {
  CHECK(harness::mean_of({2.0, 4.0, 6.0}) == doctest::Approx(4.0));
  CHECK(harness::population_stdev({2.0, 4.0, 6.0}) == doctest::Approx(std::sqrt(8.0 / 3.0)));
  CHECK(harness::population_stdev({5.0}) == 0.0);
}

TEST_CASE("run cells use paired seeds and are reproducible") {
  corpus::Dataset train = testutil::synth_tagged(10, 301);
  corpus::Dataset eval_set = testutil::synth_tagged(6, 302);

  harness::RunReport report = harness::run_cell("cell", train, eval_set, testutil::small_tags(),
                                                tiny_config(), 3, 40);
  REQUIRE(report.seeds.size() == 3);
  CHECK(report.seeds[0] == 40);
  CHECK(report.seeds[2] == 42);
  CHECK(report.mean == doctest::Approx(harness::mean_of(report.accuracies)));
  CHECK(report.stdev == doctest::Approx(harness::population_stdev(report.accuracies)));

  harness::RunReport again = harness::run_cell("cell", train, eval_set, testutil::small_tags(),
                                               tiny_config(), 3, 40);
  CHECK(again.accuracies == report.accuracies);

  // A thread pool must not change results, only wall time.
  harness::RunReport pooled = harness::run_cell("cell", train, eval_set, testutil::small_tags(),
                                                tiny_config(), 3, 40, nullptr, false, 3);
  CHECK(pooled.accuracies == report.accuracies);
}

TEST_CASE("canonical split counts tokens by gold normalization status") {
  corpus::Dataset gold = testutil::synth_norm(12, 311);
  uint64_t expected_noncanonical = 0;
  for (const auto& sentence : gold.sentences)
    for (const auto& token : sentence.tokens)
      if (*token.gold_norm != token.raw) ++expected_noncanonical;

  auto perfect = predictions_with_errors(gold, {}, "");
  harness::CanonicalSplit split = harness::canonical_split_eval(perfect, gold);
  CHECK(split.noncanonical_total == expected_noncanonical);
  CHECK(split.canonical_total == gold.token_count() - expected_noncanonical);
  CHECK(split.overall() == doctest::Approx(1.0));
  CHECK(*split.acc_canonical() == doctest::Approx(1.0));
  CHECK(split.fraction_noncanonical() ==
        doctest::Approx(static_cast<double>(expected_noncanonical) / gold.token_count()));

  auto one_miss = predictions_with_errors(gold, {{0, 0}}, "R");
  if (*gold.sentences[0].tokens[0].gold_pos != "R") {
    harness::CanonicalSplit dinged = harness::canonical_split_eval(one_miss, gold);
    CHECK(dinged.canonical_correct + dinged.noncanonical_correct == gold.token_count() - 1);
  }

  auto short_preds = perfect;
  short_preds[0].pop_back();
  CHECK_THROWS_AS(harness::canonical_split_eval(short_preds, gold), Error);
  corpus::Dataset no_norm = testutil::synth_tagged(3, 312);
  auto preds = predictions_with_errors(no_norm, {}, "");
  CHECK_THROWS_AS(harness::canonical_split_eval(preds, no_norm), Error);
}

TEST_CASE("confusion difference is antisymmetric with a zero diagonal") {
  corpus::Dataset gold = testutil::synth_tagged(10, 321);
  auto preds_a = predictions_with_errors(gold, {{0, 0}, {1, 1}, {2, 0}}, "N");
  auto preds_b = predictions_with_errors(gold, {{0, 0}, {3, 2}}, "V");

  harness::ConfusionDiff ab = harness::confusion_diff(preds_a, preds_b, gold,
                                                      testutil::small_tags());
  harness::ConfusionDiff ba = harness::confusion_diff(preds_b, preds_a, gold,
                                                      testutil::small_tags());
  const int n = testutil::small_tags().size();
  for (int g = 0; g < n; ++g)
    for (int p = 0; p < n; ++p) {
      CHECK(ab.cells[g][p] == -ba.cells[g][p]);
      if (g == p) CHECK(ab.cells[g][p] == 0);
    }

  // Net error mass equals the difference in total error counts.
  auto count_errors = [&](const std::vector<std::vector<std::string>>& preds) {
    int64_t errors = 0;
    for (size_t s = 0; s < gold.sentences.size(); ++s)
      for (size_t t = 0; t < gold.sentences[s].tokens.size(); ++t)
        errors += preds[s][t] != *gold.sentences[s].tokens[t].gold_pos;
    return errors;
  };
  int64_t total = 0;
  for (int g = 0; g < n; ++g)
    for (int p = 0; p < n; ++p) total += ab.cells[g][p];
  CHECK(total == count_errors(preds_a) - count_errors(preds_b));
}

TEST_CASE("identical systems are never significantly different") {
  corpus::Dataset gold = testutil::synth_tagged(8, 331);
  auto preds = predictions_with_errors(gold, {{0, 0}}, "N");
  CHECK(harness::significance(preds, preds, gold, 200, 3) == doctest::Approx(1.0));
}

TEST_CASE("clearly separated systems reach the smallest possible p") {
  corpus::Dataset gold = testutil::synth_tagged(30, 341);
  auto perfect = predictions_with_errors(gold, {}, "");
  std::vector<std::pair<size_t, size_t>> all_first_tokens;
  for (size_t s = 0; s < gold.sentences.size(); ++s) all_first_tokens.push_back({s, 0});
  auto wrong = predictions_with_errors(gold, all_first_tokens, "R");
  // Replace gold "D" with "R" at every first token: a large one-sided gap.
  const int rounds = 999;
  const double p = harness::significance(perfect, wrong, gold, rounds, 11);
  CHECK(p >= 1.0 / (rounds + 1));
  CHECK(p < 0.01);
}

TEST_CASE("sampled significance tracks the exhaustive enumeration") {
  corpus::Dataset gold = testutil::synth_tagged(10, 351);
  auto preds_a = predictions_with_errors(gold, {{0, 0}, {2, 1}, {4, 0}}, "N");
  auto preds_b = predictions_with_errors(gold, {{1, 0}, {3, 1}, {4, 0}, {5, 1}, {6, 0}}, "V");

  // Exhaustive: every one of the 2^10 sign assignments.
  std::vector<int64_t> diffs;
  for (size_t s = 0; s < gold.sentences.size(); ++s) {
    int64_t correct_a = 0, correct_b = 0;
    for (size_t t = 0; t < gold.sentences[s].tokens.size(); ++t) {
      correct_a += preds_a[s][t] == *gold.sentences[s].tokens[t].gold_pos;
      correct_b += preds_b[s][t] == *gold.sentences[s].tokens[t].gold_pos;
    }
    diffs.push_back(correct_a - correct_b);
  }
  int64_t observed = 0;
  for (int64_t d : diffs) observed += d;
  observed = std::llabs(observed);
  size_t hits = 0;
  const size_t combos = size_t(1) << diffs.size();
  for (size_t bits = 0; bits < combos; ++bits) {
    int64_t sum = 0;
    for (size_t s = 0; s < diffs.size(); ++s) sum += (bits >> s) & 1 ? -diffs[s] : diffs[s];
    if (std::llabs(sum) >= observed) ++hits;
  }
  const double exact = static_cast<double>(hits) / static_cast<double>(combos);

  const int rounds = 20000;
  const double sampled = harness::significance(preds_a, preds_b, gold, rounds, 17);
  const double stderr_bound = 3.0 * std::sqrt(exact * (1.0 - exact) / rounds);
  CHECK(std::fabs(sampled - exact) <= stderr_bound + 2.0 / rounds);

  CHECK_THROWS_AS(harness::significance(preds_a, preds_b, gold, 0, 1), Error);
}

TEST_CASE("report finishing computes the summary statistics") {
  harness::RunReport report = harness::finish_report("x", {1, 2}, {0.5, 0.7});
  CHECK(report.mean == doctest::Approx(0.6));
  CHECK(report.stdev == doctest::Approx(0.1));
  CHECK(report.id == "x");
}
