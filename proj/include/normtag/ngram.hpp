#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

namespace normtag::ngram {

inline constexpr const char* kSentStart = "<s>";
inline constexpr const char* kSentEnd = "</s>";

// Add-alpha smoothed unigram/bigram counts over a lowercased token stream.
// Sentence boundaries contribute <s>/</s> markers on the bigram level only;
// unigram counts and vocab_size cover real tokens.
class NgramModel {
 public:
  NgramModel() = default;

  // counts over all tokens and adjacent pairs; empty sequences are skipped.
  static NgramModel build(const std::vector<std::vector<std::string>>& corpus,
                          double alpha);

  // log((count(w)+alpha) / (total+alpha*(V+1))); unseen words share the
  // implicit UNK slot.
  double unigram_logp(const std::string& word) const;

  // log((count(prev,w)+alpha) / (count(prev)+alpha*(V+1))). prev may be
  // kSentStart (count = number of sentences); w may be kSentEnd, which
  // doubles as the UNK slot so the conditional normalizes exactly.
  double bigram_logp(const std::string& prev, const std::string& w) const;

  uint64_t unigram_count(const std::string& word) const;
  uint64_t bigram_count(const std::string& prev, const std::string& w) const;

  uint64_t total_tokens() const { return total_tokens_; }
  uint64_t vocab_size() const { return unigrams_.size(); }
  uint64_t sentence_count() const { return sentences_; }
  double alpha() const { return alpha_; }

  std::string save() const;
  static NgramModel load(const std::string& text);

 private:
  double alpha_ = 0.1;
  uint64_t total_tokens_ = 0;
  uint64_t sentences_ = 0;
  std::unordered_map<std::string, uint64_t> unigrams_;
  std::unordered_map<std::string, std::unordered_map<std::string, uint64_t>> bigrams_;
};

}  // namespace normtag::ngram
