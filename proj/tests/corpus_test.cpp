#include "doctest.h"
#include "normtag/corpus.hpp"
#include "normtag/error.hpp"

using namespace normtag;
using corpus::Dataset;
using corpus::TagSet;

TEST_CASE("twitter tagset is the standard 25-label inventory") {
  TagSet tags = TagSet::twitter();
  CHECK(tags.size() == 25);
  CHECK(tags.contains("N"));
  CHECK(tags.contains("^"));
  CHECK(tags.contains(","));
  CHECK(tags.label(tags.index_of("V")) == "V");
  CHECK_THROWS_AS(tags.index_of("NOPE"), Error);
}

TEST_CASE("tagset from file content and duplicate rejection") {
  TagSet custom = TagSet::from_file_content("A\nB\nC\n");
  CHECK(custom.size() == 3);
  CHECK(custom.index_of("B") == 1);
  CHECK_THROWS_AS(TagSet::from_file_content(""), Error);
  CHECK_THROWS_AS(TagSet(std::vector<std::string>{"A", "A"}), Error);
}

TEST_CASE("parse_pos splits sentences on blank lines and round-trips") {
  TagSet tags = TagSet::twitter();
  const std::string text = "i\tO\nrun\tV\n\nfast\tR\n";
  Dataset data = corpus::parse_pos(text, tags);
  REQUIRE(data.sentences.size() == 2);
  CHECK(data.has_pos);
  CHECK_FALSE(data.has_norm);
  CHECK(data.sentences[0].tokens.size() == 2);
  CHECK(data.sentences[0].tokens[1].raw == "run");
  CHECK(*data.sentences[0].tokens[1].gold_pos == "V");
  CHECK(data.token_count() == 3);
  CHECK(corpus::parse_pos(corpus::write_pos(data), tags) == data);
}

TEST_CASE("parse_pos error reporting carries line numbers") {
  TagSet tags = TagSet::twitter();
  CHECK_THROWS_WITH_AS(corpus::parse_pos("ok\tV\nbad\tQQ\n", tags),
                       doctest::Contains("line 2"), Error);
  try {
    corpus::parse_pos("one-column-only\n", tags);
    FAIL("expected a column count error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ColumnCount);
  }
  CHECK_THROWS_AS(corpus::parse_pos("", tags), Error);
  CHECK_THROWS_AS(corpus::parse_pos("\n\n", tags), Error);
}

TEST_CASE("parse_norm accepts two or three columns per sentence") {
  TagSet tags = TagSet::twitter();
  Dataset two = corpus::parse_norm("pix\tpictures\ncomming\tcoming\n", tags);
  CHECK(two.has_norm);
  CHECK_FALSE(two.has_pos);
  CHECK(*two.sentences[0].tokens[0].gold_norm == "pictures");

  Dataset three = corpus::parse_norm("pix\tpictures\tN\n\nnew\tnew\tA\n", tags);
  CHECK(three.has_pos);
  CHECK(*three.sentences[1].tokens[0].gold_pos == "A");
  CHECK(corpus::parse_norm(corpus::write_norm(three), tags) == three);

  // Mixed column counts within one sentence are malformed.
  CHECK_THROWS_AS(corpus::parse_norm("a\ta\tN\nb\tb\n", tags), Error);
}

TEST_CASE("parse_norm rejects empty cells") {
  TagSet tags = TagSet::twitter();
  try {
    corpus::parse_norm("pix\t\n", tags);
    FAIL("expected an empty cell error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptyCell);
  }
}

TEST_CASE("preprocess_raw replaces urls, usernames and rt") {
  auto tokens = corpus::preprocess_raw("RT @Alice check https://t.co/x and www.example.com rT");
  REQUIRE(tokens.size() == 7);
  CHECK(tokens[0] == "rt");
  CHECK(tokens[1] == "<USERNAME>");
  CHECK(tokens[3] == "<URL>");
  CHECK(tokens[5] == "<URL>");
  CHECK(tokens[6] == "rt");
  CHECK(corpus::preprocess_raw("   ").empty());
  // Plain words and embedded @ are untouched.
  auto plain = corpus::preprocess_raw("mail me@example.com");
  CHECK(plain[1] == "me@example.com");
}

TEST_CASE("dedup keeps first occurrences in order") {
  std::vector<std::vector<std::string>> seqs = {{"a", "b"}, {"c"}, {"a", "b"}, {"c"}, {"d"}};
  auto out = corpus::dedup(seqs);
  REQUIRE(out.size() == 3);
  CHECK(out[0] == std::vector<std::string>{"a", "b"});
  CHECK(out[1] == std::vector<std::string>{"c"});
  CHECK(out[2] == std::vector<std::string>{"d"});
}

TEST_CASE("vocab counts surface forms and filters by min_count") {
  std::vector<std::vector<std::string>> seqs = {{"a", "b", "a"}, {"b", "a", "c"}};
  auto counts = corpus::vocab(seqs, 1);
  CHECK(counts.at("a") == 3);
  CHECK(counts.at("c") == 1);
  auto filtered = corpus::vocab(seqs, 2);
  CHECK(filtered.count("c") == 0);
  CHECK(filtered.at("b") == 2);
  CHECK_THROWS_AS(corpus::vocab(seqs, 0), Error);
}

TEST_CASE("lowercase is ascii-only") {
  CHECK(corpus::lowercase("MiXeD123!") == "mixed123!");
}
