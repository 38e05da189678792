#include "normtag/normalizer.hpp"

#include <filesystem>
#include <sstream>

#include "normtag/error.hpp"

namespace normtag::normalizer {

namespace fs = std::filesystem;

NormMode mode_from_string(const std::string& name) {
  if (name == "none") return NormMode::kNone;
  if (name == "unk") return NormMode::kUnk;
  if (name == "all") return NormMode::kAll;
  if (name == "golded") return NormMode::kGoldEd;
  if (name == "gold") return NormMode::kGold;
  throw Error(ErrorCode::BadArgument, "unknown normalization mode '" + name + "'");
}

std::string mode_name(NormMode mode) {
  switch (mode) {
    case NormMode::kNone: return "none";
    case NormMode::kUnk: return "unk";
    case NormMode::kAll: return "all";
    case NormMode::kGoldEd: return "golded";
    case NormMode::kGold: return "gold";
  }
  return "?";
}

const std::vector<std::string>& feature_names() {
  static const std::vector<std::string> names = {
      "is_original",
      "is_spell",
      "edit_distance",
      "edit_distance_present",
      "is_embed",
      "embed_rank",
      "embed_rank_present",
      "embed_cosine",
      "embed_cosine_present",
      "is_lookup",
      "lookup_count",
      "lookup_count_present",
      "lookup_relative_freq",
      "lookup_relative_freq_present",
      "canonical_unigram_logp",
      "canonical_bigram_logp",
      "tweet_unigram_logp",
      "tweet_bigram_logp",
      "candidate_in_dict",
      "original_in_dict",
      "length_diff",
      "same_as_lower_original",
  };
  return names;
}

std::vector<double> featurize(const lexgen::Candidate& candidate, size_t token_index,
                              const corpus::Sentence& sentence, const Resources& res) {
  if (token_index >= sentence.tokens.size())
    throw Error(ErrorCode::IndexOutOfRange,
                "token index " + std::to_string(token_index) + " in a sentence of " +
                    std::to_string(sentence.tokens.size()) + " tokens");
  const std::string& raw = sentence.tokens[token_index].raw;

  std::vector<double> f(kFeatureCount, 0.0);
  f[0] = candidate.sources & lexgen::kOriginal ? 1.0 : 0.0;
  f[1] = candidate.sources & lexgen::kSpell ? 1.0 : 0.0;
  f[2] = candidate.edit_distance ? static_cast<double>(*candidate.edit_distance) : kMissingValue;
  f[3] = candidate.edit_distance ? 1.0 : 0.0;
  f[4] = candidate.sources & lexgen::kEmbed ? 1.0 : 0.0;
  f[5] = candidate.embed_rank ? static_cast<double>(*candidate.embed_rank) : kMissingValue;
  f[6] = candidate.embed_rank ? 1.0 : 0.0;
  f[7] = candidate.embed_cosine ? *candidate.embed_cosine : kMissingValue;
  f[8] = candidate.embed_cosine ? 1.0 : 0.0;
  f[9] = candidate.sources & lexgen::kLookup ? 1.0 : 0.0;
  f[10] = candidate.lookup_count ? static_cast<double>(*candidate.lookup_count) : kMissingValue;
  f[11] = candidate.lookup_count ? 1.0 : 0.0;
  if (candidate.lookup_count) {
    int64_t total = 0;
    for (const auto& [form, count] : res.lookup.candidates_for(raw)) total += count;
    f[12] = total > 0 ? static_cast<double>(*candidate.lookup_count) / static_cast<double>(total)
                      : kMissingValue;
    f[13] = total > 0 ? 1.0 : 0.0;
  } else {
    f[12] = kMissingValue;
    f[13] = 0.0;
  }
  const std::string prev =
      token_index == 0 ? std::string(ngram::kSentStart) : sentence.tokens[token_index - 1].raw;
  f[14] = res.canonical.unigram_logp(candidate.form);
  f[15] = res.canonical.bigram_logp(prev, candidate.form);
  f[16] = res.tweets.unigram_logp(candidate.form);
  f[17] = res.tweets.bigram_logp(prev, candidate.form);
  f[18] = res.dict.size() && res.dict.contains(candidate.form) ? 1.0 : 0.0;
  f[19] = res.dict.size() && res.dict.contains(raw) ? 1.0 : 0.0;
  f[20] = static_cast<double>(candidate.form.size()) - static_cast<double>(raw.size());
  f[21] = candidate.form == corpus::lowercase(raw) ? 1.0 : 0.0;
  return f;
}

lexgen::CandidateSet candidates_for_token(const std::string& raw, const Resources& res) {
  const embeddings::EmbeddingMatrix* emb = res.emb.size() > 0 ? &res.emb : nullptr;
  return lexgen::generate(raw, res.dict, res.lookup, emb, res.gen);
}

NormalizerModel train(const corpus::Dataset& training, Resources res,
                      const forest::ForestConfig& forest_config, TrainSummary* summary) {
  if (!training.has_norm)
    throw Error(ErrorCode::MissingLayer, "normalizer training needs a normalization layer");

  TrainSummary s;
  std::vector<std::vector<double>> X;
  std::vector<int> y;
  for (const auto& sentence : training.sentences) {
    for (size_t i = 0; i < sentence.tokens.size(); ++i) {
      const auto& token = sentence.tokens[i];
      const std::string gold = corpus::lowercase(*token.gold_norm);
      lexgen::CandidateSet cands = candidates_for_token(token.raw, res);
      bool covered = false;
      for (const auto& cand : cands.candidates) {
        const int label = corpus::lowercase(cand.form) == gold ? 1 : 0;
        covered = covered || label == 1;
        X.push_back(featurize(cand, i, sentence, res));
        y.push_back(label);
        ++s.instances;
        s.positives += label;
      }
      ++s.tokens;
      if (covered) ++s.covered_tokens;
    }
  }
  if (s.positives == 0)
    throw Error(ErrorCode::NoPositiveInstances,
                "no candidate matched a gold form; coverage " +
                    std::to_string(s.covered_tokens) + "/" + std::to_string(s.tokens) + " tokens");

  NormalizerModel model;
  model.res = std::move(res);
  model.ranker = forest::Forest::fit(X, y, forest_config);
  if (summary) *summary = s;
  return model;
}

namespace {

double positive_proba(const forest::Forest& ranker, const std::vector<double>& x) {
  std::vector<double> probs = ranker.predict_proba(x);
  return probs.size() > 1 ? probs[1] : 0.0;
}

// Argmax by positive-class probability; exact ties prefer ORIGINAL, then
// the lexicographically smallest form (candidates arrive form-sorted).
const lexgen::Candidate* pick(const lexgen::CandidateSet& cands, size_t token_index,
                              const corpus::Sentence& sentence, const NormalizerModel& model,
                              bool exclude_original) {
  const lexgen::Candidate* best = nullptr;
  double best_p = 0.0;
  for (const auto& cand : cands.candidates) {
    const bool is_original = cand.sources & lexgen::kOriginal;
    if (exclude_original && is_original) continue;
    const double p = positive_proba(model.ranker, featurize(cand, token_index, sentence, model.res));
    if (!best || p > best_p ||
        (p == best_p && is_original && !(best->sources & lexgen::kOriginal))) {
      best = &cand;
      best_p = p;
    }
  }
  return best;
}

void require_gold(const corpus::Sentence& sentence, NormMode mode) {
  for (const auto& token : sentence.tokens)
    if (!token.gold_norm)
      throw Error(ErrorCode::MissingLayer,
                  "mode " + mode_name(mode) + " needs gold normalization on sentence " + sentence.id);
}

bool is_unknown(const std::string& raw, const std::unordered_map<std::string, uint64_t>& vocab,
                const lexgen::Dictionary& dict) {
  if (vocab.count(raw)) return false;
  const std::string lower = corpus::lowercase(raw);
  if (lower != raw && vocab.count(lower)) return false;
  return dict.size() == 0 || !dict.contains(lower);
}

}  // namespace

corpus::Sentence normalize(const corpus::Sentence& sentence, const NormalizerModel& model,
                           NormMode mode,
                           const std::unordered_map<std::string, uint64_t>& train_vocab) {
  corpus::Sentence out = sentence;
  switch (mode) {
    case NormMode::kNone:
      return out;
    case NormMode::kGold:
      require_gold(sentence, mode);
      for (auto& token : out.tokens) token.raw = *token.gold_norm;
      return out;
    case NormMode::kGoldEd: {
      require_gold(sentence, mode);
      for (size_t i = 0; i < out.tokens.size(); ++i) {
        const auto& token = sentence.tokens[i];
        if (*token.gold_norm == token.raw) continue;
        lexgen::CandidateSet cands = candidates_for_token(token.raw, model.res);
        const lexgen::Candidate* best = pick(cands, i, sentence, model, true);
        if (best) out.tokens[i].raw = best->form;
      }
      return out;
    }
    case NormMode::kUnk:
    case NormMode::kAll: {
      for (size_t i = 0; i < out.tokens.size(); ++i) {
        const auto& token = sentence.tokens[i];
        if (mode == NormMode::kUnk && !is_unknown(token.raw, train_vocab, model.res.dict))
          continue;
        lexgen::CandidateSet cands = candidates_for_token(token.raw, model.res);
        const lexgen::Candidate* best = pick(cands, i, sentence, model, false);
        if (best && !(best->sources & lexgen::kOriginal)) out.tokens[i].raw = best->form;
      }
      return out;
    }
  }
  throw Error(ErrorCode::BadArgument, "unhandled normalization mode");
}

corpus::Dataset normalize_dataset(const corpus::Dataset& data, const NormalizerModel& model,
                                  NormMode mode,
                                  const std::unordered_map<std::string, uint64_t>& train_vocab) {
  corpus::Dataset out = data;
  for (size_t i = 0; i < data.sentences.size(); ++i)
    out.sentences[i] = normalize(data.sentences[i], model, mode, train_vocab);
  return out;
}

namespace {

std::string meta_text(const NormalizerModel& model) {
  std::ostringstream out;
  out << "schema_version=" << model.schema_version << "\n";
  out << "max_dist=" << model.res.gen.max_dist << "\n";
  out << "embed_k=" << model.res.gen.embed_k << "\n";
  out << "max_candidates=" << model.res.gen.max_candidates << "\n";
  out << "embeddings=" << (model.res.emb.size() > 0 ? 1 : 0) << "\n";
  return out.str();
}

std::unordered_map<std::string, std::string> parse_meta(const std::string& text) {
  std::unordered_map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    size_t eq = line.find('=');
    if (eq == std::string::npos || eq == 0)
      throw Error(ErrorCode::BadFormat, "meta.kv line " + std::to_string(line_no) + ": expected key=value");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

int meta_int(const std::unordered_map<std::string, std::string>& kv, const std::string& key) {
  auto it = kv.find(key);
  if (it == kv.end()) throw Error(ErrorCode::BadFormat, "meta.kv missing key '" + key + "'");
  try {
    return std::stoi(it->second);
  } catch (const std::exception&) {
    throw Error(ErrorCode::BadFormat, "meta.kv key '" + key + "' has bad value '" + it->second + "'");
  }
}

std::string require_file(const fs::path& dir, const std::string& name) {
  fs::path path = dir / name;
  if (!fs::exists(path))
    throw Error(ErrorCode::MissingResource, "model file missing: " + path.string());
  return corpus::read_file(path.string());
}

}  // namespace

void save(const NormalizerModel& model, const std::string& dir) {
  fs::create_directories(dir);
  fs::path base(dir);
  std::string dict_text;
  for (const auto& form : model.res.dict.forms()) dict_text += form + "\n";
  corpus::write_file((base / "dict.txt").string(), dict_text);
  corpus::write_file((base / "lookup.tsv").string(), model.res.lookup.serialize());
  if (model.res.emb.size() > 0)
    corpus::write_file((base / "embeddings.vec").string(), embeddings::save(model.res.emb));
  corpus::write_file((base / "ngram_canonical.txt").string(), model.res.canonical.save());
  corpus::write_file((base / "ngram_tweets.txt").string(), model.res.tweets.save());
  corpus::write_file((base / "forest.bin").string(), model.ranker.serialize());
  corpus::write_file((base / "meta.kv").string(), meta_text(model));
}

NormalizerModel load(const std::string& dir) {
  fs::path base(dir);
  if (!fs::is_directory(base))
    throw Error(ErrorCode::MissingResource, "model directory missing: " + dir);
  auto kv = parse_meta(require_file(base, "meta.kv"));
  const int version = meta_int(kv, "schema_version");
  if (version != kSchemaVersion)
    throw Error(ErrorCode::VersionMismatch, "model schema version " + std::to_string(version) +
                                                ", this build expects " +
                                                std::to_string(kSchemaVersion));
  NormalizerModel model;
  model.schema_version = version;
  model.res.gen.max_dist = meta_int(kv, "max_dist");
  model.res.gen.embed_k = meta_int(kv, "embed_k");
  model.res.gen.max_candidates = meta_int(kv, "max_candidates");
  model.res.dict = lexgen::Dictionary::from_file_content(require_file(base, "dict.txt"));
  model.res.lookup = lexgen::LookupList::parse(require_file(base, "lookup.tsv"));
  if (meta_int(kv, "embeddings") != 0)
    model.res.emb = embeddings::load(require_file(base, "embeddings.vec"));
  model.res.canonical = ngram::NgramModel::load(require_file(base, "ngram_canonical.txt"));
  model.res.tweets = ngram::NgramModel::load(require_file(base, "ngram_tweets.txt"));
  model.ranker = forest::Forest::deserialize(require_file(base, "forest.bin"));
  return model;
}

}  // namespace normtag::normalizer
