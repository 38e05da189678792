#include "normtag/selftrain.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>
#include <sstream>

#include "normtag/error.hpp"

namespace normtag::selftrain {

Strategy strategy_from_string(const std::string& name) {
  if (name == "random") return Strategy::kRandom;
  if (name == "dev-unknown") return Strategy::kDevUnknown;
  if (name == "with-ne") return Strategy::kWithNe;
  if (name == "without-ne") return Strategy::kWithoutNe;
  throw Error(ErrorCode::BadArgument, "unknown sampling strategy '" + name + "'");
}

std::string strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kRandom: return "random";
    case Strategy::kDevUnknown: return "dev-unknown";
    case Strategy::kWithNe: return "with-ne";
    case Strategy::kWithoutNe: return "without-ne";
  }
  return "?";
}

namespace {

bool looks_like_entity(const std::string& token) {
  if (token == "<URL>" || token == "<USERNAME>" || token == "rt") return false;
  if (token.empty() || !std::isupper(static_cast<unsigned char>(token[0]))) return false;
  for (size_t i = 1; i < token.size(); ++i)
    if (!std::islower(static_cast<unsigned char>(token[i]))) return false;
  return true;
}

}  // namespace

std::vector<bool> heuristic_entity_mask(const std::vector<std::vector<std::string>>& pool) {
  std::vector<bool> mask;
  mask.reserve(pool.size());
  for (const auto& tweet : pool) {
    bool has_entity = false;
    for (size_t i = 1; i < tweet.size() && !has_entity; ++i)
      has_entity = looks_like_entity(tweet[i]);
    mask.push_back(has_entity);
  }
  return mask;
}

std::vector<bool> parse_entity_mask(const std::string& text) {
  std::vector<bool> mask;
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line == "0")
      mask.push_back(false);
    else if (line == "1")
      mask.push_back(true);
    else
      throw Error(ErrorCode::BadFormat,
                  "entity mask line " + std::to_string(line_no) + ": expected 0 or 1, got '" + line + "'");
  }
  return mask;
}

std::string write_entity_mask(const std::vector<bool>& mask) {
  std::string out;
  for (bool b : mask) out += b ? "1\n" : "0\n";
  return out;
}

namespace {

std::vector<size_t> eligible_indices(const std::vector<std::vector<std::string>>& pool,
                                     const SampleConfig& config) {
  std::vector<size_t> eligible;
  switch (config.strategy) {
    case Strategy::kRandom:
      for (size_t i = 0; i < pool.size(); ++i) eligible.push_back(i);
      break;
    case Strategy::kDevUnknown: {
      if (!config.dev_vocab || !config.train_vocab)
        throw Error(ErrorCode::BadArgument, "dev-unknown sampling needs dev and train vocabularies");
      for (size_t i = 0; i < pool.size(); ++i) {
        for (const auto& word : pool[i]) {
          if (config.dev_vocab->count(word) && !config.train_vocab->count(word)) {
            eligible.push_back(i);
            break;
          }
        }
      }
      break;
    }
    case Strategy::kWithNe:
    case Strategy::kWithoutNe: {
      if (!config.entity_mask)
        throw Error(ErrorCode::BadArgument, "entity sampling needs an entity mask");
      if (config.entity_mask->size() < pool.size())
        throw Error(ErrorCode::LengthMismatch,
                    "entity mask covers " + std::to_string(config.entity_mask->size()) +
                        " tweets, pool has " + std::to_string(pool.size()));
      const bool want = config.strategy == Strategy::kWithNe;
      for (size_t i = 0; i < pool.size(); ++i)
        if ((*config.entity_mask)[i] == want) eligible.push_back(i);
      break;
    }
  }
  return eligible;
}

}  // namespace

SampleResult sample(const std::vector<std::vector<std::string>>& pool, const SampleConfig& config,
                    size_t n) {
  std::vector<size_t> eligible = eligible_indices(pool, config);

  SampleResult result;
  result.exhausted = eligible.size() < n;
  const size_t take = std::min(n, eligible.size());

  std::mt19937_64 rng(config.seed);
  for (size_t i = eligible.size(); i > 1; --i)
    std::swap(eligible[i - 1], eligible[rng() % i]);
  eligible.resize(take);
  std::sort(eligible.begin(), eligible.end());
  result.selected_indices = eligible;

  std::vector<bool> taken(pool.size(), false);
  for (size_t i : eligible) taken[i] = true;
  for (size_t i = 0; i < pool.size(); ++i) {
    if (taken[i])
      result.selected.push_back(pool[i]);
    else
      result.remaining.push_back(pool[i]);
  }
  return result;
}

namespace {

double train_and_eval(const corpus::Dataset& train, const tagger::TaggerConfig& config,
                      const corpus::TagSet& tags, const corpus::Dataset& eval_set,
                      const embeddings::EmbeddingMatrix* pretrained) {
  auto vocab = corpus::vocab(train, 1);
  tagger::TaggerModel model = tagger::init(config, tags, vocab, pretrained);
  model = tagger::train(std::move(model), train);
  return tagger::evaluate(model, eval_set);
}

}  // namespace

SelfTrainResult self_train(const corpus::Dataset& initial_train,
                           std::vector<std::vector<std::string>> pool,
                           const SelfTrainConfig& config, const tagger::TaggerConfig& tagger_config,
                           const corpus::TagSet& tags, const corpus::Dataset& eval_set,
                           const embeddings::EmbeddingMatrix* pretrained) {
  if (config.iterations < 1) throw Error(ErrorCode::BadArgument, "iterations must be >= 1");
  if (pool.empty()) throw Error(ErrorCode::EmptyInput, "empty self-training pool");

  corpus::Dataset train = initial_train;
  SelfTrainResult result;

  auto vocab = corpus::vocab(train, 1);
  tagger::TaggerModel model = tagger::init(tagger_config, tags, vocab, pretrained);
  model = tagger::train(std::move(model), train);
  result.accuracy_by_iteration.push_back({0, tagger::evaluate(model, eval_set)});

  // Entity masks are indexed against the shrinking pool, so they get
  // realigned after every draw.
  std::vector<bool> mask;
  SampleConfig sampling = config.sampling;
  if (sampling.entity_mask) mask = *sampling.entity_mask;

  for (int iter = 1; iter <= config.iterations; ++iter) {
    sampling.seed = config.sampling.seed + static_cast<uint64_t>(iter) * 0x9e3779b97f4a7c15ULL;
    if (sampling.entity_mask) sampling.entity_mask = &mask;
    SampleResult draw = sample(pool, sampling, config.per_iteration);
    if (draw.selected.empty()) {
      result.pool_exhausted = true;
      break;
    }

    for (const auto& tweet : draw.selected) {
      corpus::Sentence sentence;
      sentence.id = "pool" + std::to_string(train.sentences.size());
      std::vector<std::string> predicted = tagger::tag(model, tweet);
      for (size_t i = 0; i < tweet.size(); ++i) {
        corpus::Token token;
        token.raw = tweet[i];
        token.gold_pos = predicted[i];
        sentence.tokens.push_back(std::move(token));
      }
      train.sentences.push_back(std::move(sentence));
    }

    if (!mask.empty()) {
      std::vector<bool> next_mask;
      size_t cursor = 0;
      for (size_t i = 0; i < mask.size(); ++i) {
        if (cursor < draw.selected_indices.size() && draw.selected_indices[cursor] == i)
          ++cursor;
        else
          next_mask.push_back(mask[i]);
      }
      mask = std::move(next_mask);
    }
    pool = std::move(draw.remaining);

    vocab = corpus::vocab(train, 1);
    model = tagger::init(tagger_config, tags, vocab, pretrained);
    model = tagger::train(std::move(model), train);
    result.accuracy_by_iteration.push_back({iter, tagger::evaluate(model, eval_set)});

    if (draw.exhausted || pool.empty()) {
      result.pool_exhausted = true;
      break;
    }
  }
  result.final_train_size = train.sentences.size();
  result.final_train = std::move(train);
  return result;
}

std::vector<CurvePoint> learning_curve(const corpus::Dataset& train,
                                       const std::vector<double>& fractions, int runs,
                                       const tagger::TaggerConfig& tagger_config,
                                       const corpus::TagSet& tags,
                                       const corpus::Dataset& eval_set) {
  if (runs < 1) throw Error(ErrorCode::BadArgument, "runs must be >= 1");
  if (train.sentences.empty()) throw Error(ErrorCode::EmptyInput, "empty training set");
  for (double f : fractions)
    if (!(f > 0.0 && f <= 1.0))
      throw Error(ErrorCode::BadArgument, "fraction " + std::to_string(f) + " outside (0,1]");

  const size_t n = train.sentences.size();
  std::vector<CurvePoint> curve;
  for (double f : fractions) {
    CurvePoint point;
    point.fraction = f;
    point.sentences = static_cast<size_t>(std::ceil(f * static_cast<double>(n)));
    if (point.sentences == 0)
      throw Error(ErrorCode::EmptyInput, "fraction " + std::to_string(f) + " selects no sentences");

    for (int r = 0; r < runs; ++r) {
      const uint64_t run_seed = tagger_config.seed + static_cast<uint64_t>(r);
      std::vector<size_t> order(n);
      for (size_t i = 0; i < n; ++i) order[i] = i;
      std::mt19937_64 rng(run_seed);
      for (size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
      order.resize(point.sentences);
      std::sort(order.begin(), order.end());

      corpus::Dataset subset;
      subset.has_pos = train.has_pos;
      subset.has_norm = train.has_norm;
      for (size_t i : order) subset.sentences.push_back(train.sentences[i]);

      tagger::TaggerConfig run_config = tagger_config;
      run_config.seed = run_seed;
      point.run_accuracies.push_back(
          train_and_eval(subset, run_config, tags, eval_set, nullptr));
    }

    double sum = 0.0;
    for (double a : point.run_accuracies) sum += a;
    point.mean = sum / static_cast<double>(runs);
    double var = 0.0;
    for (double a : point.run_accuracies) var += (a - point.mean) * (a - point.mean);
    point.stdev = std::sqrt(var / static_cast<double>(runs));
    curve.push_back(std::move(point));
  }
  return curve;
}

}  // namespace normtag::selftrain
