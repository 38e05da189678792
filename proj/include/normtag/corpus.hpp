#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace normtag::corpus {

// One token of a tweet. `raw` is the surface form as found in the data;
// the two gold layers are optional and carried per token.
struct Token {
  std::string raw;
  std::optional<std::string> gold_norm;
  std::optional<std::string> gold_pos;

  bool operator==(const Token&) const = default;
};

struct Sentence {
  std::string id;
  std::vector<Token> tokens;

  bool operator==(const Sentence&) const = default;
};

// Ordered tag inventory with a label<->index bijection.
class TagSet {
 public:
  TagSet() = default;
  explicit TagSet(std::vector<std::string> labels);

  // The Twitter tagset of Gimpel et al. (N, O, S, ^, Z, L, M, V, A, R, !,
  // D, P, &, T, X, Y, #, @, ~, U, E, $, ",", G).
  static TagSet twitter();

  // One label per line.
  static TagSet from_file_content(const std::string& text);

  bool contains(const std::string& label) const { return index_.count(label) > 0; }
  int index_of(const std::string& label) const;
  const std::string& label(int index) const { return labels_.at(index); }
  int size() const { return static_cast<int>(labels_.size()); }
  const std::vector<std::string>& labels() const { return labels_; }

  bool operator==(const TagSet& other) const { return labels_ == other.labels_; }

 private:
  std::vector<std::string> labels_;
  std::unordered_map<std::string, int> index_;
};

struct Dataset {
  std::vector<Sentence> sentences;
  bool has_pos = false;
  bool has_norm = false;

  bool operator==(const Dataset&) const = default;

  size_t token_count() const;
};

// Vertical two-column format: `raw<TAB>tag`, blank line between sentences.
Dataset parse_pos(const std::string& file_content, const TagSet& tags);

// `raw<TAB>gold` or `raw<TAB>gold<TAB>tag`, blank line between sentences.
// Column count may vary across sentences but not within one; has_pos is set
// only when every sentence carries tags.
Dataset parse_norm(const std::string& file_content, const TagSet& tags);

std::string write_pos(const Dataset& dataset);
std::string write_norm(const Dataset& dataset);

// One tweet per line -> whitespace tokens with URL/username/rt replacement:
// tokens starting with http://, https:// or www. become "<URL>", @-mentions
// become "<USERNAME>", case variants of "rt" become "rt".
std::vector<std::string> preprocess_raw(const std::string& line);

// Drops exact duplicate token sequences, keeping first occurrences in order.
std::vector<std::vector<std::string>> dedup(
    const std::vector<std::vector<std::string>>& sequences);

// Surface-form counts, filtered to count >= min_count.
std::unordered_map<std::string, uint64_t> vocab(
    const std::vector<std::vector<std::string>>& sequences, uint64_t min_count);
std::unordered_map<std::string, uint64_t> vocab(const Dataset& dataset,
                                                uint64_t min_count);

// File helpers shared by the tools and the harness.
std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

// One token sequence per line, whitespace separated. Empty lines are kept
// as empty sequences when keep_empty is true.
std::vector<std::vector<std::string>> read_token_lines(const std::string& path,
                                                       bool keep_empty = false);

std::string lowercase(const std::string& s);

}  // namespace normtag::corpus
