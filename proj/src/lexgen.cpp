#include "normtag/lexgen.hpp"

#include <algorithm>
#include <cstdlib>
#include <sstream>

#include "normtag/error.hpp"

namespace normtag::lexgen {

namespace {

// Row-wise OSA with early abandon: once every cell of a row exceeds
// max_dist the final distance must too, so max_dist+1 is returned.
int osa_bounded(const std::string& a, const std::string& b, int max_dist) {
  const int n = static_cast<int>(a.size());
  const int m = static_cast<int>(b.size());
  if (std::abs(n - m) > max_dist) return max_dist + 1;
  std::vector<int> prev2(m + 1), prev(m + 1), cur(m + 1);
  for (int j = 0; j <= m; ++j) prev[j] = j;
  for (int i = 1; i <= n; ++i) {
    cur[0] = i;
    int row_min = cur[0];
    for (int j = 1; j <= m; ++j) {
      const int cost = a[i - 1] == b[j - 1] ? 0 : 1;
      int best = std::min({prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + cost});
      if (i > 1 && j > 1 && a[i - 1] == b[j - 2] && a[i - 2] == b[j - 1])
        best = std::min(best, prev2[j - 2] + 1);
      cur[j] = best;
      row_min = std::min(row_min, best);
    }
    if (row_min > max_dist) return max_dist + 1;
    std::swap(prev2, prev);
    std::swap(prev, cur);
  }
  return std::min(prev[m], max_dist + 1);
}

bool has_whitespace(const std::string& word) {
  return word.find_first_of(" \t\v\f") != std::string::npos;
}

}  // namespace

int damerau_levenshtein(const std::string& a, const std::string& b) {
  const int bound = static_cast<int>(std::max(a.size(), b.size()));
  return osa_bounded(a, b, bound);
}

void Dictionary::insert(const std::string& word, size_t line_no) {
  if (has_whitespace(word)) {
    std::string where = line_no ? "line " + std::to_string(line_no) + ": " : "";
    throw Error(ErrorCode::BadFormat, where + "dictionary word contains whitespace: '" + word + "'");
  }
  std::string lower = corpus::lowercase(word);
  if (set_.insert(lower).second) forms_.push_back(std::move(lower));
}

Dictionary::Dictionary(const std::vector<std::string>& words) {
  for (const auto& word : words)
    if (!word.empty()) insert(word, 0);
  if (forms_.empty()) throw Error(ErrorCode::EmptyInput, "dictionary has no words");
  std::sort(forms_.begin(), forms_.end());
  set_.clear();
  for (size_t i = 0; i < forms_.size(); ++i) {
    set_.insert(forms_[i]);
    if (forms_[i].size() >= by_length_.size()) by_length_.resize(forms_[i].size() + 1);
    by_length_[forms_[i].size()].push_back(static_cast<int>(i));
  }
}

Dictionary Dictionary::from_file_content(const std::string& text) {
  std::vector<std::string> words;
  size_t line_no = 0;
  std::istringstream in(text);
  std::string line;
  Dictionary dict;
  std::vector<std::pair<std::string, size_t>> staged;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    staged.push_back({line, line_no});
  }
  if (staged.empty()) throw Error(ErrorCode::EmptyInput, "dictionary has no words");
  for (const auto& [word, no] : staged) dict.insert(word, no);
  std::sort(dict.forms_.begin(), dict.forms_.end());
  dict.set_.clear();
  for (size_t i = 0; i < dict.forms_.size(); ++i) {
    dict.set_.insert(dict.forms_[i]);
    if (dict.forms_[i].size() >= dict.by_length_.size())
      dict.by_length_.resize(dict.forms_[i].size() + 1);
    dict.by_length_[dict.forms_[i].size()].push_back(static_cast<int>(i));
  }
  return dict;
}

bool Dictionary::contains(const std::string& word) const {
  return set_.count(corpus::lowercase(word)) > 0;
}

std::vector<std::pair<std::string, int>> Dictionary::within(const std::string& word,
                                                            int max_dist) const {
  if (max_dist < 0) throw Error(ErrorCode::BadArgument, "max_dist must be >= 0");
  const std::string query = corpus::lowercase(word);
  std::vector<std::pair<std::string, int>> hits;
  const int lo = std::max(0, static_cast<int>(query.size()) - max_dist);
  const int hi = std::min(static_cast<int>(by_length_.size()) - 1,
                          static_cast<int>(query.size()) + max_dist);
  for (int len = lo; len <= hi; ++len) {
    for (int idx : by_length_[len]) {
      int d = osa_bounded(query, forms_[idx], max_dist);
      if (d <= max_dist) hits.push_back({forms_[idx], d});
    }
  }
  std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second < b.second;
    return a.first < b.first;
  });
  return hits;
}

void LookupList::add(const std::string& raw, const std::string& gold, int64_t count) {
  if (count < 1) throw Error(ErrorCode::BadArgument, "lookup count must be >= 1");
  entries_[raw][gold] += count;
}

LookupList LookupList::build(const corpus::Dataset& training) {
  if (!training.has_norm)
    throw Error(ErrorCode::MissingLayer, "lookup list needs a normalization layer");
  LookupList list;
  for (const auto& sentence : training.sentences)
    for (const auto& token : sentence.tokens) list.add(token.raw, *token.gold_norm);
  return list;
}

std::vector<std::pair<std::string, int64_t>> LookupList::candidates_for(
    const std::string& word) const {
  std::map<std::string, int64_t> merged;
  auto absorb = [&](const std::string& key) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return;
    for (const auto& [gold, count] : it->second) merged[corpus::lowercase(gold)] += count;
  };
  absorb(word);
  const std::string lower = corpus::lowercase(word);
  if (lower != word) absorb(lower);
  return {merged.begin(), merged.end()};
}

std::string LookupList::serialize() const {
  std::string out;
  for (const auto& [raw, golds] : entries_)
    for (const auto& [gold, count] : golds)
      out += raw + "\t" + gold + "\t" + std::to_string(count) + "\n";
  return out;
}

LookupList LookupList::parse(const std::string& text) {
  LookupList list;
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    size_t t1 = line.find('\t');
    size_t t2 = t1 == std::string::npos ? std::string::npos : line.find('\t', t1 + 1);
    if (t2 == std::string::npos || line.find('\t', t2 + 1) != std::string::npos)
      throw Error(ErrorCode::ColumnCount,
                  "line " + std::to_string(line_no) + ": expected raw<TAB>gold<TAB>count");
    std::string raw = line.substr(0, t1);
    std::string gold = line.substr(t1 + 1, t2 - t1 - 1);
    std::string count_str = line.substr(t2 + 1);
    if (raw.empty() || gold.empty())
      throw Error(ErrorCode::EmptyCell, "line " + std::to_string(line_no) + ": empty field");
    int64_t count = 0;
    try {
      size_t used = 0;
      count = std::stoll(count_str, &used);
      if (used != count_str.size()) throw std::invalid_argument(count_str);
    } catch (const std::exception&) {
      throw Error(ErrorCode::BadFormat,
                  "line " + std::to_string(line_no) + ": bad count '" + count_str + "'");
    }
    if (count < 1)
      throw Error(ErrorCode::BadFormat,
                  "line " + std::to_string(line_no) + ": count must be >= 1");
    list.add(raw, gold, count);
  }
  return list;
}

std::vector<Candidate> spell_candidates(const std::string& word, const Dictionary& dict,
                                        int max_dist) {
  std::vector<Candidate> out;
  for (auto& [form, dist] : dict.within(word, max_dist)) {
    Candidate c;
    c.form = form;
    c.sources = kSpell;
    c.edit_distance = dist;
    out.push_back(std::move(c));
  }
  return out;
}

std::vector<Candidate> embed_candidates(const std::string& word,
                                        const embeddings::EmbeddingMatrix& emb, int k) {
  std::vector<Candidate> out;
  std::unordered_set<std::string> seen;
  int rank = 0;
  for (const auto& [neighbor, cosine] : embeddings::nearest(emb, word, k)) {
    ++rank;
    std::string form = corpus::lowercase(neighbor);
    if (!seen.insert(form).second) continue;  // case collision: keep the better rank
    Candidate c;
    c.form = std::move(form);
    c.sources = kEmbed;
    c.embed_rank = rank;
    c.embed_cosine = cosine;
    out.push_back(std::move(c));
  }
  return out;
}

const Candidate* CandidateSet::find(const std::string& form) const {
  for (const auto& c : candidates)
    if (c.form == form) return &c;
  return nullptr;
}

const Candidate* CandidateSet::original() const {
  for (const auto& c : candidates)
    if (c.sources & kOriginal) return &c;
  return nullptr;
}

namespace {

// Retention order when the cap bites: ORIGINAL first, then stronger
// evidence. Pure function of the merged candidates, so source evaluation
// order cannot change the outcome.
bool retain_before(const Candidate& a, const Candidate& b) {
  const bool ao = a.sources & kOriginal, bo = b.sources & kOriginal;
  if (ao != bo) return ao;
  const bool al = a.sources & kLookup, bl = b.sources & kLookup;
  if (al != bl) return al;
  if (al && *a.lookup_count != *b.lookup_count) return *a.lookup_count > *b.lookup_count;
  const bool as = a.sources & kSpell, bs = b.sources & kSpell;
  if (as != bs) return as;
  if (as && *a.edit_distance != *b.edit_distance) return *a.edit_distance < *b.edit_distance;
  const bool ae = a.sources & kEmbed, be = b.sources & kEmbed;
  if (ae != be) return ae;
  if (ae && *a.embed_rank != *b.embed_rank) return *a.embed_rank < *b.embed_rank;
  return a.form < b.form;
}

}  // namespace

CandidateSet generate(const std::string& word, const Dictionary& dict, const LookupList& lookup,
                      const embeddings::EmbeddingMatrix* emb, const GenConfig& config) {
  if (config.max_dist < 0 || config.embed_k < 0 || config.max_candidates < 1)
    throw Error(ErrorCode::BadArgument, "candidate generation config out of range");

  std::map<std::string, Candidate> merged;
  auto merge = [&](Candidate&& c) {
    auto [it, fresh] = merged.try_emplace(c.form, c);
    if (fresh) return;
    Candidate& dst = it->second;
    dst.sources |= c.sources;
    if (c.edit_distance) dst.edit_distance = c.edit_distance;
    if (c.embed_rank) {
      dst.embed_rank = c.embed_rank;
      dst.embed_cosine = c.embed_cosine;
    }
    if (c.lookup_count) dst.lookup_count = c.lookup_count;
  };

  Candidate original;
  original.form = word;
  original.sources = kOriginal;
  merge(std::move(original));

  for (auto& c : spell_candidates(word, dict, config.max_dist)) merge(std::move(c));

  if (emb && config.embed_k > 0) {
    auto neighbors = embed_candidates(word, *emb, config.embed_k);
    if (neighbors.empty()) {
      const std::string lower = corpus::lowercase(word);
      if (lower != word) neighbors = embed_candidates(lower, *emb, config.embed_k);
    }
    for (auto& c : neighbors) merge(std::move(c));
  }

  for (auto& [gold, count] : lookup.candidates_for(word)) {
    Candidate c;
    c.form = gold;
    c.sources = kLookup;
    c.lookup_count = count;
    merge(std::move(c));
  }

  std::vector<Candidate> all;
  all.reserve(merged.size());
  for (auto& [form, c] : merged) all.push_back(std::move(c));
  if (all.size() > static_cast<size_t>(config.max_candidates)) {
    std::sort(all.begin(), all.end(), retain_before);
    all.resize(config.max_candidates);
  }
  std::sort(all.begin(), all.end(),
            [](const Candidate& a, const Candidate& b) { return a.form < b.form; });

  CandidateSet set;
  set.word = word;
  set.candidates = std::move(all);
  return set;
}

}  // namespace normtag::lexgen
