#include <algorithm>
#include <set>

#include "doctest.h"
#include "normtag/error.hpp"
#include "normtag/selftrain.hpp"
#include "testutil.hpp"

using namespace normtag;
using selftrain::SampleConfig;
using selftrain::SampleResult;
using selftrain::Strategy;

namespace {

const std::vector<std::vector<std::string>> kPool = {
    {"just", "saw", "Obama", "today"},          // entity at a non-initial position
    {"nothing", "special", "here"},             // no entity
    {"Monday", "was", "fine"},                  // initial capital does not count
    {"rt", "<USERNAME>", "go", "Lakers"},       // entity despite placeholders
    {"all", "lowercase", "words"},              // no entity
    {"WEIRD", "CAPS", "yelling"},               // all-caps remainder is not an entity
};

tagger::TaggerConfig tiny_config() {
  tagger::TaggerConfig config;
  config.word_dim = 4;
  config.char_dim = 3;
  config.word_hidden = 4;
  config.epochs = 2;
  config.seed = 9;
  return config;
}

}  // namespace

TEST_CASE("strategy names round trip and reject unknowns") {
  for (const char* name : {"random", "dev-unknown", "with-ne", "without-ne"})
    CHECK(selftrain::strategy_name(selftrain::strategy_from_string(name)) == name);
  CHECK_THROWS_AS(selftrain::strategy_from_string("best-effort"), Error);
}

TEST_CASE("the entity heuristic flags capitalized non-initial tokens only") {
  auto mask = selftrain::heuristic_entity_mask(kPool);
  REQUIRE(mask.size() == kPool.size());
  CHECK(mask[0]);        // Obama
  CHECK_FALSE(mask[1]);
  CHECK_FALSE(mask[2]);  // sentence-initial Monday is ignored
  CHECK(mask[3]);        // Lakers
  CHECK_FALSE(mask[4]);
  CHECK_FALSE(mask[5]);  // CAPS is not Xxxx-shaped
}

TEST_CASE("entity mask text round trip and validation") {
  std::vector<bool> mask = {true, false, true};
  CHECK(selftrain::parse_entity_mask(selftrain::write_entity_mask(mask)) == mask);
  CHECK_THROWS_AS(selftrain::parse_entity_mask("1\n2\n"), Error);
  CHECK_THROWS_AS(selftrain::parse_entity_mask("yes\n"), Error);
}

TEST_CASE("random sampling partitions the pool exactly") {
  SampleConfig config;
  config.seed = 4;
  SampleResult draw = selftrain::sample(kPool, config, 2);
  CHECK(draw.selected.size() == 2);
  CHECK(draw.remaining.size() == kPool.size() - 2);
  CHECK_FALSE(draw.exhausted);

  // Ascending indices, and selected[i] is the pool entry at that index.
  REQUIRE(draw.selected_indices.size() == 2);
  CHECK(std::is_sorted(draw.selected_indices.begin(), draw.selected_indices.end()));
  for (size_t i = 0; i < draw.selected_indices.size(); ++i)
    CHECK(draw.selected[i] == kPool[draw.selected_indices[i]]);

  // selected + remaining rebuilds the pool in order.
  std::vector<std::vector<std::string>> rebuilt;
  size_t cursor = 0;
  for (size_t i = 0; i < kPool.size(); ++i) {
    if (cursor < draw.selected_indices.size() && draw.selected_indices[cursor] == i) {
      rebuilt.push_back(draw.selected[cursor]);
      ++cursor;
    }
  }
  for (const auto& tweet : draw.remaining) rebuilt.push_back(tweet);
  std::multiset<std::string> pool_flat, rebuilt_flat;
  for (const auto& tweet : kPool) pool_flat.insert(tweet.begin(), tweet.end());
  for (const auto& tweet : rebuilt) rebuilt_flat.insert(tweet.begin(), tweet.end());
  CHECK(pool_flat == rebuilt_flat);

  // Identical seeds draw identical samples.
  SampleResult again = selftrain::sample(kPool, config, 2);
  CHECK(again.selected_indices == draw.selected_indices);
}

TEST_CASE("oversized requests return every eligible tweet and flag exhaustion") {
  SampleConfig config;
  SampleResult draw = selftrain::sample(kPool, config, 100);
  CHECK(draw.exhausted);
  CHECK(draw.selected.size() == kPool.size());
  CHECK(draw.remaining.empty());
}

TEST_CASE("entity strategies need a mask of the right length") {
  SampleConfig config;
  config.strategy = Strategy::kWithNe;
  CHECK_THROWS_AS(selftrain::sample(kPool, config, 1), Error);

  std::vector<bool> short_mask = {true, false};
  config.entity_mask = &short_mask;
  CHECK_THROWS_AS(selftrain::sample(kPool, config, 1), Error);

  auto mask = selftrain::heuristic_entity_mask(kPool);
  config.entity_mask = &mask;
  SampleResult with = selftrain::sample(kPool, config, 100);
  CHECK(with.selected.size() == 2);  // the two entity tweets
  for (const auto& tweet : with.selected)
    CHECK((tweet == kPool[0] || tweet == kPool[3]));

  config.strategy = Strategy::kWithoutNe;
  SampleResult without = selftrain::sample(kPool, config, 100);
  CHECK(without.selected.size() == kPool.size() - 2);
}

TEST_CASE("dev-unknown selects tweets containing dev-only words") {
  std::unordered_map<std::string, uint64_t> dev_vocab = {{"Obama", 1}, {"special", 2}};
  std::unordered_map<std::string, uint64_t> train_vocab = {{"special", 5}};

  SampleConfig config;
  config.strategy = Strategy::kDevUnknown;
  CHECK_THROWS_AS(selftrain::sample(kPool, config, 1), Error);

  config.dev_vocab = &dev_vocab;
  config.train_vocab = &train_vocab;
  SampleResult draw = selftrain::sample(kPool, config, 100);
  // Only the Obama tweet carries a dev word missing from training data;
  // "special" is known, so its tweet is ineligible.
  REQUIRE(draw.selected.size() == 1);
  CHECK(draw.selected[0] == kPool[0]);
}

TEST_CASE("self-training grows the training set by the sampled amount") {
  corpus::Dataset train = testutil::synth_tagged(8, 201);
  auto pool = testutil::synth_token_lines(11, 202);

  selftrain::SelfTrainConfig config;
  config.iterations = 2;
  config.per_iteration = 4;
  config.sampling.seed = 7;

  auto result = selftrain::self_train(train, pool, config, tiny_config(), testutil::small_tags(),
                                      testutil::synth_tagged(6, 203));
  CHECK(result.final_train_size == 8 + 2 * 4);
  REQUIRE(result.accuracy_by_iteration.size() == 3);
  CHECK(result.accuracy_by_iteration[0].first == 0);
  CHECK(result.accuracy_by_iteration[2].first == 2);
  CHECK_FALSE(result.pool_exhausted);

  // Initial sentences are untouched, and every added tweet carries tags.
  REQUIRE(result.final_train.sentences.size() == result.final_train_size);
  for (size_t s = 0; s < train.sentences.size(); ++s)
    CHECK(result.final_train.sentences[s] == train.sentences[s]);
  for (size_t s = train.sentences.size(); s < result.final_train.sentences.size(); ++s)
    for (const auto& token : result.final_train.sentences[s].tokens)
      CHECK(token.gold_pos.has_value());
}

TEST_CASE("labels added in earlier iterations are never rewritten") {
  corpus::Dataset train = testutil::synth_tagged(6, 211);
  auto pool = testutil::synth_token_lines(12, 212);
  corpus::Dataset eval_set = testutil::synth_tagged(5, 213);

  selftrain::SelfTrainConfig one;
  one.iterations = 1;
  one.per_iteration = 3;
  one.sampling.seed = 31;
  selftrain::SelfTrainConfig two = one;
  two.iterations = 2;

  auto first = selftrain::self_train(train, pool, one, tiny_config(), testutil::small_tags(),
                                     eval_set);
  auto second = selftrain::self_train(train, pool, two, tiny_config(), testutil::small_tags(),
                                      eval_set);
  // The 2-iteration run extends the 1-iteration run without edits.
  REQUIRE(second.final_train.sentences.size() > first.final_train.sentences.size());
  for (size_t s = 0; s < first.final_train.sentences.size(); ++s)
    CHECK(second.final_train.sentences[s] == first.final_train.sentences[s]);
}

TEST_CASE("self-training stops when the pool runs dry") {
  corpus::Dataset train = testutil::synth_tagged(5, 221);
  auto pool = testutil::synth_token_lines(5, 222);

  selftrain::SelfTrainConfig config;
  config.iterations = 10;
  config.per_iteration = 3;

  auto result = selftrain::self_train(train, pool, config, tiny_config(), testutil::small_tags(),
                                      testutil::synth_tagged(4, 223));
  CHECK(result.pool_exhausted);
  CHECK(result.final_train_size == 5 + 5);  // every pool tweet eventually joined
  CHECK_THROWS_AS(selftrain::self_train(train, {}, config, tiny_config(), testutil::small_tags(),
                                        testutil::synth_tagged(4, 223)),
                  Error);
}

TEST_CASE("the learning curve at fraction 1.0 equals a plain training run") {
  corpus::Dataset train = testutil::synth_tagged(10, 231);
  corpus::Dataset eval_set = testutil::synth_tagged(6, 232);
  tagger::TaggerConfig config = tiny_config();

  auto curve = selftrain::learning_curve(train, {0.5, 1.0}, 2, config, testutil::small_tags(),
                                         eval_set);
  REQUIRE(curve.size() == 2);
  CHECK(curve[0].sentences == 5);
  CHECK(curve[1].sentences == 10);
  REQUIRE(curve[1].run_accuracies.size() == 2);

  for (int r = 0; r < 2; ++r) {
    tagger::TaggerConfig run_config = config;
    run_config.seed = config.seed + static_cast<uint64_t>(r);
    tagger::TaggerModel model =
        tagger::init(run_config, testutil::small_tags(), corpus::vocab(train, 1));
    model = tagger::train(std::move(model), train);
    CHECK(curve[1].run_accuracies[r] == tagger::evaluate(model, eval_set));
  }

  CHECK_THROWS_AS(selftrain::learning_curve(train, {0.0}, 2, config, testutil::small_tags(),
                                            eval_set),
                  Error);
  CHECK_THROWS_AS(selftrain::learning_curve(train, {1.5}, 2, config, testutil::small_tags(),
                                            eval_set),
                  Error);
}
