#pragma once

// Synthetic data builders shared by the unit and acceptance suites. All
// generators are pure functions of their seed.

#include <cstdint>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "normtag/corpus.hpp"

namespace testutil {

// Tag inventory for small experiments. Word identity determines the tag, so
// a tagger that memorizes the lexicon scores close to 100%.
inline const std::vector<std::pair<std::string, std::string>>& lexicon() {
  static const std::vector<std::pair<std::string, std::string>> entries = {
      {"cat", "N"},   {"dog", "N"},    {"bird", "N"},  {"tree", "N"},  {"car", "N"},
      {"fish", "N"},  {"runs", "V"},   {"sees", "V"},  {"likes", "V"}, {"eats", "V"},
      {"finds", "V"}, {"the", "D"},    {"a", "D"},     {"every", "D"}, {"big", "J"},
      {"red", "J"},   {"small", "J"},  {"old", "J"},   {"fast", "J"},  {"slowly", "R"},
      {"often", "R"}, {"never", "R"},  {"here", "R"},
  };
  return entries;
}

inline normtag::corpus::TagSet small_tags() {
  return normtag::corpus::TagSet({"D", "J", "N", "R", "V"});
}

// D (J) N V (R): short grammatical sentences over the fixed lexicon.
inline normtag::corpus::Dataset synth_tagged(size_t n_sentences, uint64_t seed) {
  std::vector<std::vector<std::string>> by_tag(5);
  const std::vector<std::string> tag_order = {"D", "J", "N", "R", "V"};
  for (const auto& [word, tag] : lexicon())
    for (size_t t = 0; t < tag_order.size(); ++t)
      if (tag_order[t] == tag) by_tag[t].push_back(word);

  std::mt19937_64 rng(seed);
  auto pick = [&](size_t tag_idx) { return by_tag[tag_idx][rng() % by_tag[tag_idx].size()]; };

  normtag::corpus::Dataset data;
  data.has_pos = true;
  for (size_t s = 0; s < n_sentences; ++s) {
    normtag::corpus::Sentence sentence;
    sentence.id = "synth" + std::to_string(s);
    auto push = [&](const std::string& word, const std::string& tag) {
      sentence.tokens.push_back({word, std::nullopt, tag});
    };
    push(pick(0), "D");
    if (rng() % 2) push(pick(1), "J");
    push(pick(2), "N");
    push(pick(4), "V");
    if (rng() % 2) push(pick(3), "R");
    data.sentences.push_back(std::move(sentence));
  }
  return data;
}

// One random single-character corruption: duplication, deletion, adjacent
// swap, or substitution. Never returns the input unchanged.
inline std::string corrupt(const std::string& word, std::mt19937_64& rng) {
  if (word.size() < 2) return word + word.back();
  std::string out = word;
  switch (rng() % 4) {
    case 0: {  // duplicate a letter ("good" -> "goood")
      size_t i = rng() % out.size();
      out.insert(out.begin() + i, out[i]);
      break;
    }
    case 1: {  // drop a letter
      out.erase(out.begin() + rng() % out.size());
      break;
    }
    case 2: {  // swap adjacent letters
      size_t i = rng() % (out.size() - 1);
      if (out[i] == out[i + 1]) out.insert(out.begin() + i, out[i]);
      else std::swap(out[i], out[i + 1]);
      break;
    }
    default: {  // substitute with a neighboring alphabet letter
      size_t i = rng() % out.size();
      out[i] = out[i] == 'z' ? 'y' : out[i] + 1;
      break;
    }
  }
  return out == word ? out + out.back() : out;
}

// Tagged sentences with a normalization layer: roughly `noise_rate` of the
// tokens are corrupted single-edit variants whose gold form is the clean
// word. Gold tags stay aligned with the clean lexicon entry.
inline normtag::corpus::Dataset synth_norm(size_t n_sentences, uint64_t seed,
                                           double noise_rate = 0.3) {
  normtag::corpus::Dataset data = synth_tagged(n_sentences, seed);
  data.has_norm = true;
  std::mt19937_64 rng(seed ^ 0x6e6f697365ULL);
  for (auto& sentence : data.sentences) {
    for (auto& token : sentence.tokens) {
      token.gold_norm = token.raw;
      if (token.raw.size() >= 3 &&
          std::uniform_real_distribution<double>(0.0, 1.0)(rng) < noise_rate)
        token.raw = corrupt(*token.gold_norm, rng);
    }
  }
  return data;
}

// Every clean word of the lexicon, for dictionary construction.
inline std::vector<std::string> lexicon_words() {
  std::vector<std::string> words;
  for (const auto& [word, tag] : lexicon()) words.push_back(word);
  return words;
}

inline std::vector<std::vector<std::string>> token_lines_of(const normtag::corpus::Dataset& data) {
  std::vector<std::vector<std::string>> lines;
  for (const auto& sentence : data.sentences) {
    std::vector<std::string> tokens;
    for (const auto& token : sentence.tokens) tokens.push_back(token.raw);
    lines.push_back(std::move(tokens));
  }
  return lines;
}

// Plain token lines sampling the clean lexicon, for embedding or n-gram
// corpora.
inline std::vector<std::vector<std::string>> synth_token_lines(size_t n_lines, uint64_t seed) {
  return token_lines_of(synth_tagged(n_lines, seed));
}

}  // namespace testutil
