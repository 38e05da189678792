#pragma once

// Normalization candidate generation. Three evidence sources feed a merged
// candidate set per token: bounded edit-distance search over a canonical
// dictionary, embedding nearest neighbors, and a lookup list counted from
// normalization training pairs. The original surface form is always a
// candidate so the ranker can choose to leave a token alone.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_set>
#include <utility>
#include <vector>

#include "normtag/corpus.hpp"
#include "normtag/embeddings.hpp"

namespace normtag::lexgen {

enum SourceFlag : unsigned {
  kOriginal = 1u,
  kSpell = 2u,
  kEmbed = 4u,
  kLookup = 8u,
};

struct Candidate {
  std::string form;
  unsigned sources = 0;
  std::optional<int> edit_distance;        // present iff kSpell
  std::optional<int> embed_rank;           // 1-based, present iff kEmbed
  std::optional<double> embed_cosine;      // present iff kEmbed
  std::optional<int64_t> lookup_count;     // present iff kLookup
};

// Canonical word forms, stored lowercase; lookups are case-insensitive.
class Dictionary {
 public:
  Dictionary() = default;
  explicit Dictionary(const std::vector<std::string>& words);

  // One word per line; blank lines skipped. Throws on interior whitespace
  // or when no words remain.
  static Dictionary from_file_content(const std::string& text);

  bool contains(const std::string& word) const;
  size_t size() const { return forms_.size(); }
  const std::vector<std::string>& forms() const { return forms_; }

  // All entries within OSA distance max_dist of lowercase(word), with their
  // true distances, sorted by (distance, lexicographic).
  std::vector<std::pair<std::string, int>> within(const std::string& word, int max_dist) const;

 private:
  void insert(const std::string& word, size_t line_no);

  std::vector<std::string> forms_;              // sorted unique lowercase
  std::unordered_set<std::string> set_;
  std::vector<std::vector<int>> by_length_;     // indices into forms_, bucketed by length
};

// Counts of raw -> gold pairs observed in normalization training data.
// Keys are surface forms as seen; queries merge the verbatim and lowercased
// key and report gold forms lowercased.
class LookupList {
 public:
  void add(const std::string& raw, const std::string& gold, int64_t count = 1);
  static LookupList build(const corpus::Dataset& training);

  // Lowercased gold forms with summed counts, sorted by form.
  std::vector<std::pair<std::string, int64_t>> candidates_for(const std::string& word) const;

  const std::map<std::string, std::map<std::string, int64_t>>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }

  // raw<TAB>gold<TAB>count lines, keys sorted.
  std::string serialize() const;
  static LookupList parse(const std::string& text);

 private:
  std::map<std::string, std::map<std::string, int64_t>> entries_;
};

// Optimal string alignment distance: Levenshtein plus adjacent
// transposition, each substring edited at most once.
int damerau_levenshtein(const std::string& a, const std::string& b);

std::vector<Candidate> spell_candidates(const std::string& word, const Dictionary& dict,
                                        int max_dist);

// k nearest vocabulary words of `word` by cosine, lowercased with the best
// rank kept on case collisions. Out-of-vocabulary queries yield an empty
// sequence (no embedding evidence).
std::vector<Candidate> embed_candidates(const std::string& word,
                                        const embeddings::EmbeddingMatrix& emb, int k);

struct GenConfig {
  int max_dist = 2;
  int embed_k = 40;
  int max_candidates = 60;
};

struct CandidateSet {
  std::string word;
  std::vector<Candidate> candidates;  // sorted by form

  const Candidate* find(const std::string& form) const;
  const Candidate* original() const;
};

// Union of the three sources plus ORIGINAL, merged by form with source
// flags OR-ed. Capped at config.max_candidates; ORIGINAL is never evicted,
// then lookup evidence outranks spell which outranks embeddings.
// emb may be null when no embedding model is available.
CandidateSet generate(const std::string& word, const Dictionary& dict, const LookupList& lookup,
                      const embeddings::EmbeddingMatrix* emb, const GenConfig& config = {});

}  // namespace normtag::lexgen
