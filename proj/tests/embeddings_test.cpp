#include <cmath>
#include <random>

#include "doctest.h"
#include "normtag/embeddings.hpp"
#include "normtag/error.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace normtag;
using embeddings::EmbeddingConfig;
using embeddings::EmbeddingMatrix;

TEST_CASE("position blocks enumerate signed offsets without gaps") {
  // window 2: offsets -2 -1 +1 +2 -> blocks 0 1 2 3
  CHECK(embeddings::position_block(-2, 2) == 0);
  CHECK(embeddings::position_block(-1, 2) == 1);
  CHECK(embeddings::position_block(1, 2) == 2);
  CHECK(embeddings::position_block(2, 2) == 3);
  CHECK(embeddings::position_block(-1, 1) == 0);
  CHECK(embeddings::position_block(1, 1) == 1);
}

TEST_CASE("pair loss matches the negative log sigmoid form") {
  auto sigmoid = [](double x) { return 1.0 / (1.0 + std::exp(-x)); };
  for (double dot : {-4.0, -0.5, 0.0, 1.25, 7.0}) {
    auto pos = embeddings::sgns_pair(dot, 1);
    auto neg = embeddings::sgns_pair(dot, 0);
    CHECK(pos.loss == doctest::Approx(-std::log(sigmoid(dot))));
    CHECK(neg.loss == doctest::Approx(-std::log(sigmoid(-dot))));
    CHECK(pos.dloss_ddot == doctest::Approx(sigmoid(dot) - 1.0));
    CHECK(neg.dloss_ddot == doctest::Approx(sigmoid(dot)));
  }
  // Large magnitudes must not overflow through exp.
  CHECK(std::isfinite(embeddings::sgns_pair(800.0, 0).loss));
  CHECK(std::isfinite(embeddings::sgns_pair(-800.0, 1).loss));
}

TEST_CASE("pair loss derivative agrees with central differences") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> dots(-6.0, 6.0);
  for (int i = 0; i < 200; ++i) {
    const double dot = dots(rng);
    const int label = static_cast<int>(rng() % 2);
    const double analytic = embeddings::sgns_pair(dot, label).dloss_ddot;
    const double fd = oracle::central_diff(
        [&](double x) { return embeddings::sgns_pair(x, label).loss; }, dot);
    CHECK(oracle::rel_error(analytic, fd) < 1e-4);
  }
}

TEST_CASE("training is deterministic for one worker and sensitive to the seed") {
  auto corpus = testutil::synth_token_lines(40, 3);
  EmbeddingConfig config;
  config.dim = 8;
  config.epochs = 2;
  config.seed = 11;
  EmbeddingMatrix a = embeddings::train(corpus, config);
  EmbeddingMatrix b = embeddings::train(corpus, config);
  CHECK(embeddings::save(a) == embeddings::save(b));
  config.seed = 12;
  CHECK(embeddings::save(a) != embeddings::save(embeddings::train(corpus, config)));
}

TEST_CASE("structured training allocates one output block per offset") {
  auto corpus = testutil::synth_token_lines(30, 5);
  EmbeddingConfig config;
  config.dim = 6;
  config.window = 2;
  config.structured = true;
  config.epochs = 1;
  EmbeddingMatrix emb = embeddings::train(corpus, config);
  CHECK(emb.structured);
  CHECK(emb.out_dim() == 2 * 2 * 6);
  CHECK(emb.output.size() == static_cast<size_t>(emb.size()) * emb.out_dim());
}

TEST_CASE("structured output vectors separate left-only from right-only contexts") {
  // "lword" occurs only left of the anchor, "rword" only right. Plain
  // skip-gram pushes both output vectors toward the anchor's input vector,
  // so they end up nearly parallel. Structured training confines each word's
  // updates to its observed position block, so the same comparison collapses.
  std::vector<std::vector<std::string>> corpus(60, {"lword", "anchor", "rword"});
  EmbeddingConfig config;
  config.dim = 8;
  config.window = 1;
  config.epochs = 5;
  config.negatives = 2;
  config.subsample = 0.0;
  config.seed = 33;

  auto out_cosine = [](const EmbeddingMatrix& emb, const std::string& a, const std::string& b) {
    const size_t width = static_cast<size_t>(emb.out_dim());
    const float* va = emb.output.data() + static_cast<size_t>(emb.index.at(a)) * width;
    const float* vb = emb.output.data() + static_cast<size_t>(emb.index.at(b)) * width;
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (size_t k = 0; k < width; ++k) {
      dot += static_cast<double>(va[k]) * vb[k];
      na += static_cast<double>(va[k]) * va[k];
      nb += static_cast<double>(vb[k]) * vb[k];
    }
    return dot / std::sqrt(na * nb);
  };

  EmbeddingMatrix plain = embeddings::train(corpus, config);
  const double plain_cos = out_cosine(plain, "lword", "rword");

  config.structured = true;
  EmbeddingMatrix structured = embeddings::train(corpus, config);
  const double structured_cos = out_cosine(structured, "lword", "rword");

  CHECK(plain_cos > 0.8);
  CHECK(structured_cos < plain_cos - 0.3);
}

TEST_CASE("mean pair loss drops over epochs on a co-occurrence corpus") {
  auto corpus = testutil::synth_token_lines(120, 9);
  EmbeddingConfig config;
  config.dim = 16;
  config.epochs = 5;
  config.subsample = 0.0;  // keep every token so the signal is stable
  embeddings::TrainStats stats;
  embeddings::train(corpus, config, &stats);
  REQUIRE(stats.epoch_mean_loss.size() == 5);
  CHECK(stats.epoch_mean_loss.back() < stats.epoch_mean_loss.front());
  CHECK(stats.pairs_total > 0);
}

TEST_CASE("min_count drops rare words from the vocabulary") {
  std::vector<std::vector<std::string>> corpus = {{"common", "common", "common", "rare"},
                                                  {"common", "other", "other"}};
  EmbeddingConfig config;
  config.dim = 4;
  config.min_count = 2;
  config.epochs = 1;
  EmbeddingMatrix emb = embeddings::train(corpus, config);
  CHECK(emb.contains("common"));
  CHECK(emb.contains("other"));
  CHECK_FALSE(emb.contains("rare"));
}

TEST_CASE("nearest equals an exhaustive cosine scan") {
  auto corpus = testutil::synth_token_lines(60, 21);
  EmbeddingConfig config;
  config.dim = 10;
  config.epochs = 2;
  EmbeddingMatrix emb = embeddings::train(corpus, config);

  for (const std::string& query : {std::string("cat"), std::string("the"), std::string("runs")}) {
    auto got = embeddings::nearest(emb, query, 5);
    auto expected = oracle::cosine_scan(emb.words, emb.input, emb.dim, query, 5);
    REQUIRE(got.size() == expected.size());
    for (size_t i = 0; i < got.size(); ++i) {
      CHECK(got[i].first == expected[i].first);
      CHECK(got[i].second == doctest::Approx(expected[i].second).epsilon(1e-9));
    }
  }
  CHECK(embeddings::nearest(emb, "not-in-vocab", 5).empty());
}

TEST_CASE("embedding text format round trip") {
  auto corpus = testutil::synth_token_lines(25, 2);
  EmbeddingConfig config;
  config.dim = 5;
  config.epochs = 1;

  SUBCASE("plain") {
    EmbeddingMatrix emb = embeddings::train(corpus, config);
    EmbeddingMatrix loaded = embeddings::load(embeddings::save(emb));
    CHECK(loaded.words == emb.words);
    CHECK(loaded.dim == emb.dim);
    CHECK_FALSE(loaded.structured);
    for (size_t i = 0; i < emb.input.size(); ++i)
      CHECK(loaded.input[i] == doctest::Approx(emb.input[i]).epsilon(1e-5));
  }

  SUBCASE("structured keeps window and output blocks") {
    config.structured = true;
    config.window = 2;
    EmbeddingMatrix emb = embeddings::train(corpus, config);
    EmbeddingMatrix loaded = embeddings::load(embeddings::save(emb));
    CHECK(loaded.structured);
    CHECK(loaded.window == 2);
    CHECK(loaded.out_dim() == emb.out_dim());
    CHECK(loaded.output.size() == emb.output.size());
  }
}

TEST_CASE("embedding load rejects malformed input") {
  CHECK_THROWS_AS(embeddings::load(""), Error);
  CHECK_THROWS_AS(embeddings::load("2 3\nw 1.0 2.0 3.0\n"), Error);      // missing row
  CHECK_THROWS_AS(embeddings::load("1 3\nw 1.0 2.0\n"), Error);          // short row
  CHECK_THROWS_AS(embeddings::load("1 2\nw 1 2\nw 3 4\n"), Error);       // duplicate word
  CHECK_THROWS_AS(embeddings::load("x 2\nw 1 2\n"), Error);              // bad header
}

TEST_CASE("training validates its configuration") {
  auto corpus = testutil::synth_token_lines(5, 1);
  EmbeddingConfig config;
  config.dim = 0;
  CHECK_THROWS_AS(embeddings::train(corpus, config), Error);
  config.dim = 4;
  config.window = 0;
  CHECK_THROWS_AS(embeddings::train(corpus, config), Error);
  config.window = 1;
  CHECK_THROWS_AS(embeddings::train({}, config), Error);
}
