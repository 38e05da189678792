#include "normtag/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "normtag/error.hpp"

namespace normtag::corpus {

namespace {

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cells;
  size_t start = 0;
  while (true) {
    size_t tab = line.find('\t', start);
    if (tab == std::string::npos) {
      cells.push_back(line.substr(start));
      break;
    }
    cells.push_back(line.substr(start, tab - start));
    start = tab + 1;
  }
  return cells;
}

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  size_t start = 0;
  while (start <= text.size()) {
    size_t nl = text.find('\n', start);
    if (nl == std::string::npos) {
      if (start < text.size()) lines.push_back(text.substr(start));
      break;
    }
    std::string line = text.substr(start, nl - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(std::move(line));
    start = nl + 1;
  }
  return lines;
}

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

bool has_ci_prefix(const std::string& token, const char* prefix) {
  size_t n = std::char_traits<char>::length(prefix);
  if (token.size() < n) return false;
  for (size_t i = 0; i < n; ++i) {
    if (std::tolower(static_cast<unsigned char>(token[i])) != prefix[i]) return false;
  }
  return true;
}

}  // namespace

TagSet::TagSet(std::vector<std::string> labels) : labels_(std::move(labels)) {
  for (size_t i = 0; i < labels_.size(); ++i) {
    auto [it, inserted] = index_.emplace(labels_[i], static_cast<int>(i));
    if (!inserted) throw Error(ErrorCode::BadArgument, "duplicate tag label '" + labels_[i] + "'");
  }
}

TagSet TagSet::twitter() {
  return TagSet({"N", "O", "S", "^", "Z", "L", "M", "V", "A", "R", "!", "D", "P",
                 "&", "T", "X", "Y", "#", "@", "~", "U", "E", "$", ",", "G"});
}

TagSet TagSet::from_file_content(const std::string& text) {
  std::vector<std::string> labels;
  for (const std::string& line : split_lines(text)) {
    if (!line.empty()) labels.push_back(line);
  }
  if (labels.empty()) throw Error(ErrorCode::EmptyInput, "tagset file has no labels");
  return TagSet(std::move(labels));
}

int TagSet::index_of(const std::string& label) const {
  auto it = index_.find(label);
  if (it == index_.end()) throw Error(ErrorCode::UnknownTag, "'" + label + "'");
  return it->second;
}

size_t Dataset::token_count() const {
  size_t n = 0;
  for (const Sentence& s : sentences) n += s.tokens.size();
  return n;
}

Dataset parse_pos(const std::string& file_content, const TagSet& tags) {
  Dataset dataset;
  Sentence current;
  size_t line_no = 0;
  auto flush = [&]() {
    if (!current.tokens.empty()) {
      current.id = "s" + std::to_string(dataset.sentences.size());
      dataset.sentences.push_back(std::move(current));
      current = Sentence{};
    }
  };
  for (const std::string& line : split_lines(file_content)) {
    ++line_no;
    if (line.empty()) {
      flush();
      continue;
    }
    std::vector<std::string> cells = split_tabs(line);
    if (cells.size() != 2)
      throw Error(ErrorCode::ColumnCount, "line " + std::to_string(line_no) + ": expected 2 columns, got " +
                                              std::to_string(cells.size()));
    if (cells[0].empty())
      throw Error(ErrorCode::EmptyCell, "line " + std::to_string(line_no) + ": empty token");
    if (!tags.contains(cells[1]))
      throw Error(ErrorCode::UnknownTag, "'" + cells[1] + "' at line " + std::to_string(line_no));
    Token token;
    token.raw = cells[0];
    token.gold_pos = cells[1];
    current.tokens.push_back(std::move(token));
  }
  flush();
  if (dataset.sentences.empty()) throw Error(ErrorCode::EmptyInput, "no sentences");
  dataset.has_pos = true;
  return dataset;
}

Dataset parse_norm(const std::string& file_content, const TagSet& tags) {
  Dataset dataset;
  Sentence current;
  size_t current_cols = 0;
  size_t line_no = 0;
  bool all_tagged = true;
  auto flush = [&]() {
    if (!current.tokens.empty()) {
      if (current_cols == 2) all_tagged = false;
      current.id = "s" + std::to_string(dataset.sentences.size());
      dataset.sentences.push_back(std::move(current));
      current = Sentence{};
      current_cols = 0;
    }
  };
  for (const std::string& line : split_lines(file_content)) {
    ++line_no;
    if (line.empty()) {
      flush();
      continue;
    }
    std::vector<std::string> cells = split_tabs(line);
    if (cells.size() != 2 && cells.size() != 3)
      throw Error(ErrorCode::ColumnCount, "line " + std::to_string(line_no) + ": expected 2 or 3 columns, got " +
                                              std::to_string(cells.size()));
    if (current_cols == 0) current_cols = cells.size();
    if (cells.size() != current_cols)
      throw Error(ErrorCode::ColumnCount,
                  "line " + std::to_string(line_no) + ": column count changes within a sentence");
    if (cells[0].empty())
      throw Error(ErrorCode::EmptyCell, "line " + std::to_string(line_no) + ": empty token");
    if (cells[1].empty())
      throw Error(ErrorCode::EmptyCell, "line " + std::to_string(line_no) + ": empty gold form");
    Token token;
    token.raw = cells[0];
    token.gold_norm = cells[1];
    if (cells.size() == 3) {
      if (!tags.contains(cells[2]))
        throw Error(ErrorCode::UnknownTag, "'" + cells[2] + "' at line " + std::to_string(line_no));
      token.gold_pos = cells[2];
    }
    current.tokens.push_back(std::move(token));
  }
  flush();
  if (dataset.sentences.empty()) throw Error(ErrorCode::EmptyInput, "no sentences");
  dataset.has_norm = true;
  dataset.has_pos = all_tagged;
  return dataset;
}

std::string write_pos(const Dataset& dataset) {
  if (!dataset.has_pos) throw Error(ErrorCode::MissingLayer, "dataset has no POS layer");
  std::string out;
  for (const Sentence& sentence : dataset.sentences) {
    for (const Token& token : sentence.tokens) {
      out += token.raw;
      out += '\t';
      out += *token.gold_pos;
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

std::string write_norm(const Dataset& dataset) {
  if (!dataset.has_norm) throw Error(ErrorCode::MissingLayer, "dataset has no normalization layer");
  std::string out;
  for (const Sentence& sentence : dataset.sentences) {
    for (const Token& token : sentence.tokens) {
      out += token.raw;
      out += '\t';
      out += *token.gold_norm;
      if (dataset.has_pos) {
        out += '\t';
        out += *token.gold_pos;
      }
      out += '\n';
    }
    out += '\n';
  }
  return out;
}

std::vector<std::string> preprocess_raw(const std::string& line) {
  std::vector<std::string> tokens;
  size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i == start) break;
    std::string token = line.substr(start, i - start);
    if (has_ci_prefix(token, "http://") || has_ci_prefix(token, "https://") ||
        has_ci_prefix(token, "www.")) {
      token = "<URL>";
    } else if (token.size() >= 2 && token[0] == '@' && is_word_char(token[1])) {
      token = "<USERNAME>";
    } else if (token.size() == 2 &&
               std::tolower(static_cast<unsigned char>(token[0])) == 'r' &&
               std::tolower(static_cast<unsigned char>(token[1])) == 't') {
      token = "rt";
    }
    tokens.push_back(std::move(token));
  }
  return tokens;
}

std::vector<std::vector<std::string>> dedup(
    const std::vector<std::vector<std::string>>& sequences) {
  std::vector<std::vector<std::string>> kept;
  std::unordered_set<std::string> seen;
  for (const auto& sequence : sequences) {
    std::string key;
    for (const auto& token : sequence) {
      key += token;
      key += '\x1f';
    }
    if (seen.insert(std::move(key)).second) kept.push_back(sequence);
  }
  return kept;
}

std::unordered_map<std::string, uint64_t> vocab(
    const std::vector<std::vector<std::string>>& sequences, uint64_t min_count) {
  if (min_count < 1) throw Error(ErrorCode::BadArgument, "min_count must be >= 1");
  std::unordered_map<std::string, uint64_t> counts;
  for (const auto& sequence : sequences)
    for (const auto& token : sequence) ++counts[token];
  if (min_count > 1) {
    for (auto it = counts.begin(); it != counts.end();) {
      if (it->second < min_count)
        it = counts.erase(it);
      else
        ++it;
    }
  }
  return counts;
}

std::unordered_map<std::string, uint64_t> vocab(const Dataset& dataset, uint64_t min_count) {
  if (min_count < 1) throw Error(ErrorCode::BadArgument, "min_count must be >= 1");
  std::unordered_map<std::string, uint64_t> counts;
  for (const Sentence& sentence : dataset.sentences)
    for (const Token& token : sentence.tokens) ++counts[token.raw];
  if (min_count > 1) {
    for (auto it = counts.begin(); it != counts.end();) {
      if (it->second < min_count)
        it = counts.erase(it);
      else
        ++it;
    }
  }
  return counts;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot open '" + path + "' for writing");
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error(ErrorCode::IoError, "write failed for '" + path + "'");
}

std::vector<std::vector<std::string>> read_token_lines(const std::string& path, bool keep_empty) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open '" + path + "'");
  std::vector<std::vector<std::string>> sequences;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> tokens;
    std::istringstream stream(line);
    std::string token;
    while (stream >> token) tokens.push_back(token);
    if (!tokens.empty() || keep_empty) sequences.push_back(std::move(tokens));
  }
  return sequences;
}

std::string lowercase(const std::string& s) {
  std::string out = s;
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

}  // namespace normtag::corpus
