#include <random>

#include "doctest.h"
#include "normtag/corpus.hpp"
#include "normtag/embeddings.hpp"
#include "normtag/error.hpp"
#include "normtag/lexgen.hpp"
#include "oracles.hpp"
#include "testutil.hpp"

using namespace normtag;
using lexgen::Candidate;
using lexgen::CandidateSet;
using lexgen::Dictionary;
using lexgen::LookupList;

namespace {

std::string random_word(std::mt19937_64& rng, int max_len) {
  const int len = 1 + static_cast<int>(rng() % max_len);
  std::string word;
  for (int i = 0; i < len; ++i) word += static_cast<char>('a' + rng() % 4);
  return word;
}

}  // namespace

TEST_CASE("edit distance handles the textbook cases") {
  CHECK(lexgen::damerau_levenshtein("", "") == 0);
  CHECK(lexgen::damerau_levenshtein("abc", "abc") == 0);
  CHECK(lexgen::damerau_levenshtein("abc", "") == 3);
  CHECK(lexgen::damerau_levenshtein("kitten", "sitting") == 3);
  CHECK(lexgen::damerau_levenshtein("abcd", "abdc") == 1);   // adjacent swap
  CHECK(lexgen::damerau_levenshtein("comming", "coming") == 1);
  CHECK(lexgen::damerau_levenshtein("pix", "pictures") == 6);
  // Optimal string alignment edits each substring once, so this is 3, not
  // the unrestricted Damerau distance of 2.
  CHECK(lexgen::damerau_levenshtein("ca", "abc") == 3);
}

TEST_CASE("edit distance equals the full-matrix reference on random pairs") {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 300; ++i) {
    const std::string a = random_word(rng, 8);
    const std::string b = random_word(rng, 8);
    CHECK(lexgen::damerau_levenshtein(a, b) == oracle::osa_distance(a, b));
    CHECK(lexgen::damerau_levenshtein(a, b) == lexgen::damerau_levenshtein(b, a));
  }
}

TEST_CASE("dictionary stores lowercase forms and matches case-insensitively") {
  Dictionary dict(std::vector<std::string>{"Apple", "banana", "APPLE"});
  CHECK(dict.size() == 2);
  CHECK(dict.contains("apple"));
  CHECK(dict.contains("ApPlE"));
  CHECK_FALSE(dict.contains("cherry"));

  Dictionary parsed = Dictionary::from_file_content("one\n\ntwo\nOne\n");
  CHECK(parsed.size() == 2);
  CHECK_THROWS_AS(Dictionary::from_file_content("two words\n"), Error);
  CHECK_THROWS_AS(Dictionary::from_file_content("\n\n"), Error);
  CHECK_THROWS_AS(Dictionary(std::vector<std::string>{}), Error);
}

TEST_CASE("bounded dictionary search equals the brute-force scan") {
  std::mt19937_64 rng(23);
  std::vector<std::string> words;
  for (int i = 0; i < 500; ++i) words.push_back(random_word(rng, 7));
  Dictionary dict(words);

  for (int q = 0; q < 60; ++q) {
    const std::string query = random_word(rng, 7);
    for (int max_dist : {0, 1, 2}) {
      auto got = dict.within(query, max_dist);
      auto expected = oracle::dict_scan(dict.forms(), query, max_dist);
      REQUIRE(got.size() == expected.size());
      for (size_t i = 0; i < got.size(); ++i) {
        CHECK(got[i].first == expected[i].first);
        CHECK(got[i].second == expected[i].second);
      }
    }
  }
}

TEST_CASE("spell candidates carry distances and the spell source flag") {
  Dictionary dict(std::vector<std::string>{"coming", "common", "comma"});
  auto candidates = lexgen::spell_candidates("comming", dict, 2);
  REQUIRE(!candidates.empty());
  CHECK(candidates[0].form == "coming");
  CHECK(candidates[0].sources == lexgen::kSpell);
  CHECK(*candidates[0].edit_distance == 1);
  for (const auto& c : candidates) CHECK(*c.edit_distance <= 2);
}

TEST_CASE("lookup list merges case variants and reports lowercase golds") {
  LookupList lookup;
  lookup.add("2day", "today");
  lookup.add("2Day", "Today");
  lookup.add("2day", "today", 3);

  // The verbatim key and its lowercase twin merge; golds come back lowercase.
  auto candidates = lookup.candidates_for("2Day");
  REQUIRE(candidates.size() == 1);
  CHECK(candidates[0].first == "today");
  CHECK(candidates[0].second == 5);

  // Other case variants only reach the lowercase key.
  auto shouted = lookup.candidates_for("2DAY");
  REQUIRE(shouted.size() == 1);
  CHECK(shouted[0].second == 4);
  CHECK(lookup.candidates_for("nothing").empty());
  CHECK_THROWS_AS(lookup.add("a", "b", 0), Error);
}

TEST_CASE("lookup list builds from the normalization layer only") {
  corpus::Dataset data = testutil::synth_norm(10, 4);
  LookupList lookup = LookupList::build(data);
  CHECK(lookup.size() > 0);

  corpus::Dataset no_norm = testutil::synth_tagged(3, 1);
  CHECK_THROWS_AS(LookupList::build(no_norm), Error);
}

TEST_CASE("lookup list text round trip and parse errors") {
  LookupList lookup;
  lookup.add("pix", "pictures", 2);
  lookup.add("2day", "today");
  LookupList reparsed = LookupList::parse(lookup.serialize());
  CHECK(reparsed.serialize() == lookup.serialize());

  CHECK_THROWS_AS(LookupList::parse("only\ttwo\n"), Error);
  CHECK_THROWS_AS(LookupList::parse("a\tb\tnot-a-number\n"), Error);
  CHECK_THROWS_AS(LookupList::parse("a\t\t3\n"), Error);
}

TEST_CASE("embedding candidates are lowercase ranked neighbors") {
  auto corpus_lines = testutil::synth_token_lines(60, 31);
  embeddings::EmbeddingConfig config;
  config.dim = 8;
  config.epochs = 2;
  embeddings::EmbeddingMatrix emb = embeddings::train(corpus_lines, config);

  auto candidates = lexgen::embed_candidates("cat", emb, 5);
  REQUIRE(!candidates.empty());
  CHECK(candidates.size() <= 5);
  int last_rank = 0;
  for (const auto& c : candidates) {
    CHECK(c.sources == lexgen::kEmbed);
    CHECK(*c.embed_rank > last_rank);
    last_rank = *c.embed_rank;
    CHECK(c.form == corpus::lowercase(c.form));
  }
  CHECK(lexgen::embed_candidates("never-in-vocab", emb, 5).empty());
}

TEST_CASE("generation merges sources and always includes the original form") {
  Dictionary dict(std::vector<std::string>{"coming", "come", "comic"});
  LookupList lookup;
  lookup.add("comming", "coming", 4);

  CandidateSet set = lexgen::generate("comming", dict, lookup, nullptr);
  const Candidate* original = set.original();
  REQUIRE(original != nullptr);
  CHECK(original->form == "comming");

  const Candidate* merged = set.find("coming");
  REQUIRE(merged != nullptr);
  CHECK((merged->sources & lexgen::kSpell) != 0);
  CHECK((merged->sources & lexgen::kLookup) != 0);
  CHECK(*merged->edit_distance == 1);
  CHECK(*merged->lookup_count == 4);

  // Sorted by form, no duplicates.
  for (size_t i = 1; i < set.candidates.size(); ++i)
    CHECK(set.candidates[i - 1].form < set.candidates[i].form);
}

TEST_CASE("the original form keeps its case while other candidates are lowercase") {
  Dictionary dict(std::vector<std::string>{"monday"});
  LookupList lookup;
  CandidateSet set = lexgen::generate("Monday", dict, lookup, nullptr);
  const Candidate* original = set.original();
  REQUIRE(original != nullptr);
  CHECK(original->form == "Monday");
  // The dictionary hit appears as its own lowercase candidate.
  const Candidate* hit = set.find("monday");
  REQUIRE(hit != nullptr);
  CHECK((hit->sources & lexgen::kSpell) != 0);
}

TEST_CASE("the candidate cap never evicts the original form") {
  // Large dictionary of distance-1 variants forces the cap to bite.
  std::vector<std::string> words;
  for (char c = 'a'; c <= 'z'; ++c)
    for (int pos = 0; pos < 4; ++pos) {
      std::string w = "word";
      w[pos] = c;
      words.push_back(w);
    }
  Dictionary dict(words);
  LookupList lookup;
  lookup.add("wort", "word", 9);

  lexgen::GenConfig config;
  config.max_candidates = 10;
  CandidateSet set = lexgen::generate("wort", dict, lookup, nullptr, config);
  CHECK(set.candidates.size() <= 10);
  CHECK(set.original() != nullptr);
  // Lookup evidence survives the cap ahead of spell-only candidates.
  CHECK(set.find("word") != nullptr);
}
