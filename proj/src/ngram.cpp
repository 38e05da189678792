#include "normtag/ngram.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "normtag/corpus.hpp"
#include "normtag/error.hpp"

namespace normtag::ngram {

NgramModel NgramModel::build(const std::vector<std::vector<std::string>>& corpus, double alpha) {
  if (alpha <= 0.0) throw Error(ErrorCode::BadArgument, "alpha must be > 0");
  NgramModel model;
  model.alpha_ = alpha;
  for (const auto& sequence : corpus) {
    if (sequence.empty()) continue;
    ++model.sentences_;
    std::string prev = kSentStart;
    for (const auto& token : sequence) {
      std::string word = corpus::lowercase(token);
      ++model.unigrams_[word];
      ++model.total_tokens_;
      ++model.bigrams_[prev][word];
      prev = std::move(word);
    }
    ++model.bigrams_[prev][kSentEnd];
  }
  return model;
}

uint64_t NgramModel::unigram_count(const std::string& word) const {
  auto it = unigrams_.find(corpus::lowercase(word));
  return it == unigrams_.end() ? 0 : it->second;
}

uint64_t NgramModel::bigram_count(const std::string& prev, const std::string& w) const {
  std::string p = prev == kSentStart ? prev : corpus::lowercase(prev);
  std::string q = w == kSentEnd ? w : corpus::lowercase(w);
  auto it = bigrams_.find(p);
  if (it == bigrams_.end()) return 0;
  auto jt = it->second.find(q);
  return jt == it->second.end() ? 0 : jt->second;
}

double NgramModel::unigram_logp(const std::string& word) const {
  double numer = static_cast<double>(unigram_count(word)) + alpha_;
  double denom = static_cast<double>(total_tokens_) +
                 alpha_ * (static_cast<double>(vocab_size()) + 1.0);
  return std::log(numer / denom);
}

double NgramModel::bigram_logp(const std::string& prev, const std::string& w) const {
  uint64_t prev_count =
      prev == kSentStart ? sentences_ : unigram_count(prev);
  double numer = static_cast<double>(bigram_count(prev, w)) + alpha_;
  double denom = static_cast<double>(prev_count) +
                 alpha_ * (static_cast<double>(vocab_size()) + 1.0);
  return std::log(numer / denom);
}

std::string NgramModel::save() const {
  std::ostringstream out;
  out.precision(17);
  out << "ngram 1\n";
  out << "alpha " << alpha_ << "\n";
  out << "total " << total_tokens_ << "\n";
  out << "sentences " << sentences_ << "\n";
  std::vector<std::pair<std::string, uint64_t>> unis(unigrams_.begin(), unigrams_.end());
  std::sort(unis.begin(), unis.end());
  out << "unigrams " << unis.size() << "\n";
  for (const auto& [word, count] : unis) out << word << " " << count << "\n";
  std::vector<std::pair<std::pair<std::string, std::string>, uint64_t>> bis;
  for (const auto& [prev, row] : bigrams_)
    for (const auto& [w, count] : row) bis.push_back({{prev, w}, count});
  std::sort(bis.begin(), bis.end());
  out << "bigrams " << bis.size() << "\n";
  for (const auto& [pair, count] : bis) out << pair.first << " " << pair.second << " " << count << "\n";
  return out.str();
}

NgramModel NgramModel::load(const std::string& text) {
  std::istringstream in(text);
  std::string tag;
  int version = 0;
  if (!(in >> tag >> version) || tag != "ngram" || version != 1)
    throw Error(ErrorCode::BadFormat, "not an ngram model file");
  NgramModel model;
  uint64_t n_uni = 0, n_bi = 0;
  if (!(in >> tag >> model.alpha_) || tag != "alpha")
    throw Error(ErrorCode::BadFormat, "missing alpha");
  if (!(in >> tag >> model.total_tokens_) || tag != "total")
    throw Error(ErrorCode::BadFormat, "missing total");
  if (!(in >> tag >> model.sentences_) || tag != "sentences")
    throw Error(ErrorCode::BadFormat, "missing sentences");
  if (!(in >> tag >> n_uni) || tag != "unigrams")
    throw Error(ErrorCode::BadFormat, "missing unigrams section");
  for (uint64_t i = 0; i < n_uni; ++i) {
    std::string word;
    uint64_t count;
    if (!(in >> word >> count)) throw Error(ErrorCode::Truncated, "unigram row " + std::to_string(i));
    model.unigrams_[word] = count;
  }
  if (!(in >> tag >> n_bi) || tag != "bigrams")
    throw Error(ErrorCode::BadFormat, "missing bigrams section");
  for (uint64_t i = 0; i < n_bi; ++i) {
    std::string prev, w;
    uint64_t count;
    if (!(in >> prev >> w >> count)) throw Error(ErrorCode::Truncated, "bigram row " + std::to_string(i));
    model.bigrams_[prev][w] = count;
  }
  return model;
}

}  // namespace normtag::ngram
