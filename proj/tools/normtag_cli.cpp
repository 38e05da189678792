// Command-line front end: preprocessing, model training, normalization,
// tagging, and the grid/report experiments, all as subcommands of one
// binary. Exits 0 on success, 1 with a single stderr line on failure.

#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "normtag/corpus.hpp"
#include "normtag/embeddings.hpp"
#include "normtag/error.hpp"
#include "normtag/forest.hpp"
#include "normtag/harness.hpp"
#include "normtag/lexgen.hpp"
#include "normtag/ngram.hpp"
#include "normtag/normalizer.hpp"
#include "normtag/selftrain.hpp"
#include "normtag/tagger.hpp"

namespace fs = std::filesystem;
using namespace normtag;
using nlohmann::json;

namespace {

struct GlobalOpts {
  uint64_t seed = 1;
  int runs = 5;
  int jobs = 1;
  std::string out_dir = ".";
  std::string tagset_path;
};

corpus::TagSet load_tagset(const GlobalOpts& g) {
  if (g.tagset_path.empty()) return corpus::TagSet::twitter();
  return corpus::TagSet::from_file_content(corpus::read_file(g.tagset_path));
}

std::string require_readable(const std::string& path, const std::string& what) {
  if (!fs::exists(path))
    throw Error(ErrorCode::MissingResource, what + " file missing: " + path);
  return corpus::read_file(path);
}

// Vertical TSV detection: the first non-empty line carries at least one tab.
bool looks_vertical(const std::string& content) {
  size_t pos = 0;
  while (pos < content.size()) {
    size_t end = content.find('\n', pos);
    if (end == std::string::npos) end = content.size();
    std::string line = content.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) return line.find('\t') != std::string::npos;
    pos = end + 1;
  }
  return false;
}

int column_count(const std::string& content) {
  size_t pos = 0;
  while (pos < content.size()) {
    size_t end = content.find('\n', pos);
    if (end == std::string::npos) end = content.size();
    std::string line = content.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) {
      int tabs = 0;
      for (char c : line)
        if (c == '\t') ++tabs;
      return tabs + 1;
    }
    pos = end + 1;
  }
  return 0;
}

// Tagged data: two columns -> token/tag, three -> token/gold/tag.
corpus::Dataset load_tagged(const std::string& path, const corpus::TagSet& tags,
                            const std::string& what) {
  const std::string content = require_readable(path, what);
  const int cols = column_count(content);
  if (cols == 2) return corpus::parse_pos(content, tags);
  if (cols == 3) return corpus::parse_norm(content, tags);
  throw Error(ErrorCode::ColumnCount,
              what + " file " + path + ": expected 2 or 3 tab-separated columns, found " +
                  std::to_string(cols));
}

std::vector<std::vector<std::string>> load_token_lines(const std::string& path,
                                                       const std::string& what) {
  require_readable(path, what);
  return corpus::read_token_lines(path);
}

void write_out(const GlobalOpts& g, const std::string& name, const std::string& content) {
  fs::create_directories(g.out_dir);
  const std::string path = (fs::path(g.out_dir) / name).string();
  corpus::write_file(path, content);
  std::cout << "wrote " << path << "\n";
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

json report_json(const harness::RunReport& r) {
  return {{"id", r.id},
          {"mean", r.mean},
          {"stdev", r.stdev},
          {"accuracies", r.accuracies},
          {"seeds", r.seeds}};
}

void add_embedding_options(CLI::App* cmd, embeddings::EmbeddingConfig& config) {
  cmd->add_option("--dim", config.dim, "vector dimensionality");
  cmd->add_option("--window", config.window, "context window size");
  cmd->add_option("--negatives", config.negatives, "negative samples per pair");
  cmd->add_option("--subsample", config.subsample, "frequent-word subsampling threshold");
  cmd->add_option("--epochs", config.epochs, "training epochs");
  cmd->add_option("--min-count", config.min_count, "minimum word count");
  cmd->add_flag("--structured", config.structured, "position-specific output blocks");
  cmd->add_option("--lr", config.learning_rate, "initial learning rate");
  cmd->add_option("--workers", config.workers, "training threads (1 = deterministic)");
}

void add_tagger_options(CLI::App* cmd, tagger::TaggerConfig& config) {
  cmd->add_option("--epochs", config.epochs, "training epochs");
  cmd->add_option("--layers", config.layers, "stacked bi-LSTM layers");
  cmd->add_option("--word-dim", config.word_dim, "word embedding size");
  cmd->add_option("--char-dim", config.char_dim, "char embedding / char LSTM size");
  cmd->add_option("--word-hidden", config.word_hidden, "word LSTM hidden size per direction");
  cmd->add_option("--sigma", config.noise_sigma, "Gaussian input noise stdev (training)");
  cmd->add_option("--lr", config.learning_rate, "Adam learning rate");
  cmd->add_option("--unk-threshold", config.unk_threshold, "min count to keep a word");
  cmd->add_flag("!--no-update-embeddings", config.update_embeddings,
                "freeze the word table during training");
}

void add_forest_options(CLI::App* cmd, forest::ForestConfig& config) {
  cmd->add_option("--trees", config.n_trees, "number of trees");
  cmd->add_option("--max-depth", config.max_depth, "max split levels (0 = unlimited)");
  cmd->add_option("--min-split", config.min_samples_split, "min samples to split");
  cmd->add_option("--mtry", config.features_per_split, "features per split (0 = sqrt)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"POS tagging of noisy text: normalization, embeddings, self-training"};
  app.require_subcommand(1);
  app.set_config("--config", "", "key=value config file");
  app.fallthrough();

  GlobalOpts g;
  app.add_option("--seed", g.seed, "base random seed")->capture_default_str();
  app.add_option("--runs", g.runs, "runs per reported cell")->capture_default_str();
  app.add_option("-j,--jobs", g.jobs, "worker threads for independent runs")
      ->capture_default_str();
  app.add_option("--out-dir", g.out_dir, "directory for report files")->capture_default_str();
  app.add_option("--tagset", g.tagset_path, "tag inventory file (one label per line)");

  // preprocess
  auto* preprocess = app.add_subcommand("preprocess", "tokenize raw tweets");
  std::string pre_in, pre_out, pre_mask;
  bool pre_dedup = false;
  preprocess->add_option("--in", pre_in, "raw tweets, one per line")->required();
  preprocess->add_option("--out", pre_out, "token lines output")->required();
  preprocess->add_flag("--dedup", pre_dedup, "drop duplicate tweets");
  preprocess->add_option("--emit-mask", pre_mask, "also write a heuristic entity mask");
  preprocess->callback([&] {
    const std::string content = require_readable(pre_in, "input");
    std::vector<std::vector<std::string>> tweets;
    size_t pos = 0;
    while (pos < content.size()) {
      size_t end = content.find('\n', pos);
      if (end == std::string::npos) end = content.size();
      std::string line = content.substr(pos, end - pos);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!line.empty()) {
        auto tokens = corpus::preprocess_raw(line);
        if (!tokens.empty()) tweets.push_back(std::move(tokens));
      }
      pos = end + 1;
    }
    if (pre_dedup) tweets = corpus::dedup(tweets);
    std::string out;
    for (const auto& tweet : tweets) out += join_tokens(tweet) + "\n";
    corpus::write_file(pre_out, out);
    if (!pre_mask.empty())
      corpus::write_file(pre_mask, selftrain::write_entity_mask(selftrain::heuristic_entity_mask(tweets)));
    std::cout << tweets.size() << " tweets written\n";
  });

  // train-embeddings
  auto* trainemb = app.add_subcommand("train-embeddings", "skip-gram embeddings from token lines");
  std::string emb_corpus_path, emb_out;
  embeddings::EmbeddingConfig emb_config;
  trainemb->add_option("--corpus", emb_corpus_path, "token lines")->required();
  trainemb->add_option("--out", emb_out, "output vector file")->required();
  add_embedding_options(trainemb, emb_config);
  trainemb->callback([&] {
    emb_config.seed = g.seed;
    auto corpus_lines = load_token_lines(emb_corpus_path, "corpus");
    embeddings::TrainStats stats;
    embeddings::EmbeddingMatrix emb = embeddings::train(corpus_lines, emb_config, &stats);
    corpus::write_file(emb_out, embeddings::save(emb));
    std::cout << emb.size() << " vectors, dim " << emb.dim << ", "
              << stats.pairs_total << " training pairs\n";
  });

  // train-normalizer
  auto* trainnorm = app.add_subcommand("train-normalizer", "candidate ranker from annotated tweets");
  std::string tn_train, tn_dict, tn_emb, tn_canonical, tn_tweets, tn_out;
  double tn_alpha = 0.1;
  forest::ForestConfig tn_forest;
  lexgen::GenConfig tn_gen;
  trainnorm->add_option("--train", tn_train, "token<TAB>gold[<TAB>tag] training file")->required();
  trainnorm->add_option("--dict", tn_dict, "dictionary, one word per line")->required();
  trainnorm->add_option("--emb", tn_emb, "embedding vectors (optional)");
  trainnorm->add_option("--canonical", tn_canonical, "canonical token lines for n-grams")->required();
  trainnorm->add_option("--tweets", tn_tweets, "tweet token lines for n-grams")->required();
  trainnorm->add_option("--out", tn_out, "model directory")->required();
  trainnorm->add_option("--alpha", tn_alpha, "n-gram smoothing");
  trainnorm->add_option("--max-dist", tn_gen.max_dist, "spell search distance");
  trainnorm->add_option("--embed-k", tn_gen.embed_k, "embedding neighbors");
  trainnorm->add_option("--max-candidates", tn_gen.max_candidates, "candidate cap");
  add_forest_options(trainnorm, tn_forest);
  trainnorm->callback([&] {
    const corpus::TagSet tags = load_tagset(g);
    corpus::Dataset train = corpus::parse_norm(require_readable(tn_train, "training"), tags);
    normalizer::Resources res;
    res.gen = tn_gen;
    res.dict = lexgen::Dictionary::from_file_content(require_readable(tn_dict, "dictionary"));
    res.lookup = lexgen::LookupList::build(train);
    if (!tn_emb.empty()) res.emb = embeddings::load(require_readable(tn_emb, "embeddings"));
    res.canonical = ngram::NgramModel::build(load_token_lines(tn_canonical, "canonical corpus"), tn_alpha);
    res.tweets = ngram::NgramModel::build(load_token_lines(tn_tweets, "tweet corpus"), tn_alpha);
    tn_forest.seed = g.seed;
    normalizer::TrainSummary summary;
    normalizer::NormalizerModel model = normalizer::train(train, std::move(res), tn_forest, &summary);
    normalizer::save(model, tn_out);
    std::cout << "candidate coverage " << summary.covered_tokens << "/" << summary.tokens << " tokens ("
              << summary.positives << " positive of " << summary.instances << " instances)\n";
  });

  // normalize
  auto* normalize = app.add_subcommand("normalize", "rewrite tokens under a test-time mode");
  std::string nz_mode = "all", nz_model, nz_in, nz_out, nz_vocab;
  normalize->add_option("--mode", nz_mode, "none|unk|all|golded|gold");
  normalize->add_option("--model", nz_model, "normalizer model directory")->required();
  normalize->add_option("--in", nz_in, "token lines or token<TAB>gold[<TAB>tag]")->required();
  normalize->add_option("--out", nz_out, "output file")->required();
  normalize->add_option("--train-vocab", nz_vocab, "token lines defining known words (unk mode)");
  normalize->callback([&] {
    const corpus::TagSet tags = load_tagset(g);
    normalizer::NormMode mode = normalizer::mode_from_string(nz_mode);
    normalizer::NormalizerModel model = normalizer::load(nz_model);
    std::unordered_map<std::string, uint64_t> vocab_map;
    if (!nz_vocab.empty()) vocab_map = corpus::vocab(load_token_lines(nz_vocab, "train vocab"), 1);
    const std::string content = require_readable(nz_in, "input");
    if (looks_vertical(content)) {
      corpus::Dataset data = corpus::parse_norm(content, tags);
      corpus::Dataset result = normalizer::normalize_dataset(data, model, mode, vocab_map);
      corpus::write_file(nz_out, corpus::write_norm(result));
    } else {
      auto lines = corpus::read_token_lines(nz_in);
      std::string out;
      for (const auto& tokens : lines) {
        corpus::Sentence sentence;
        for (const auto& raw : tokens) sentence.tokens.push_back({raw, std::nullopt, std::nullopt});
        corpus::Sentence result = normalizer::normalize(sentence, model, mode, vocab_map);
        std::vector<std::string> forms;
        for (const auto& token : result.tokens) forms.push_back(token.raw);
        out += join_tokens(forms) + "\n";
      }
      corpus::write_file(nz_out, out);
    }
    std::cout << "normalized with mode " << normalizer::mode_name(mode) << "\n";
  });

  // train-tagger
  auto* traintag = app.add_subcommand("train-tagger", "bi-LSTM tagger from tagged tweets");
  std::string tt_train, tt_out, tt_emb;
  tagger::TaggerConfig tt_config;
  traintag->add_option("--train", tt_train, "token<TAB>tag training file")->required();
  traintag->add_option("--out", tt_out, "model file")->required();
  traintag->add_option("--emb", tt_emb, "pretrained vectors for the word table");
  add_tagger_options(traintag, tt_config);
  traintag->callback([&] {
    const corpus::TagSet tags = load_tagset(g);
    corpus::Dataset train = load_tagged(tt_train, tags, "training");
    tt_config.seed = g.seed;
    std::optional<embeddings::EmbeddingMatrix> emb;
    if (!tt_emb.empty()) emb = embeddings::load(require_readable(tt_emb, "embeddings"));
    auto vocab_map = corpus::vocab(train, 1);
    tagger::TrainStats stats;
    tagger::TaggerModel model =
        tagger::train(tagger::init(tt_config, tags, vocab_map, emb ? &*emb : nullptr), train, &stats);
    corpus::write_file(tt_out, tagger::save(model));
    std::cout << "final epoch mean loss " << stats.epoch_mean_loss.back() << "\n";
  });

  // tag
  auto* tagcmd = app.add_subcommand("tag", "tag tokens with a trained model");
  std::string tg_model, tg_in, tg_out;
  tagcmd->add_option("--model", tg_model, "tagger model file")->required();
  tagcmd->add_option("--in", tg_in, "token lines or vertical TSV")->required();
  tagcmd->add_option("--out", tg_out, "token<TAB>tag output")->required();
  tagcmd->callback([&] {
    tagger::TaggerModel model = tagger::load(require_readable(tg_model, "model"));
    const std::string content = require_readable(tg_in, "input");
    std::vector<std::vector<std::string>> sentences;
    if (looks_vertical(content)) {
      corpus::Dataset data = column_count(content) == 2 ? corpus::parse_pos(content, model.tags)
                                                        : corpus::parse_norm(content, model.tags);
      for (const auto& sentence : data.sentences) {
        std::vector<std::string> tokens;
        for (const auto& token : sentence.tokens) tokens.push_back(token.raw);
        sentences.push_back(std::move(tokens));
      }
    } else {
      sentences = corpus::read_token_lines(tg_in);
    }
    corpus::Dataset out;
    out.has_pos = true;
    for (size_t i = 0; i < sentences.size(); ++i) {
      if (sentences[i].empty()) continue;
      corpus::Sentence sentence;
      sentence.id = "s" + std::to_string(i);
      std::vector<std::string> predicted = tagger::tag(model, sentences[i]);
      for (size_t t = 0; t < sentences[i].size(); ++t)
        sentence.tokens.push_back({sentences[i][t], std::nullopt, predicted[t]});
      out.sentences.push_back(std::move(sentence));
    }
    corpus::write_file(tg_out, corpus::write_pos(out));
    std::cout << out.sentences.size() << " sentences tagged\n";
  });

  // eval
  auto* evalcmd = app.add_subcommand("eval", "token accuracy of a model on tagged data");
  std::string ev_model, ev_in;
  evalcmd->add_option("--model", ev_model, "tagger model file")->required();
  evalcmd->add_option("--in", ev_in, "token<TAB>tag or token<TAB>gold<TAB>tag")->required();
  evalcmd->callback([&] {
    tagger::TaggerModel model = tagger::load(require_readable(ev_model, "model"));
    corpus::Dataset data = load_tagged(ev_in, model.tags, "evaluation");
    if (!data.has_pos) throw Error(ErrorCode::MissingLayer, "evaluation data has no tags");
    const double acc = tagger::evaluate(model, data);
    std::cout << "accuracy " << acc << " over " << data.token_count() << " tokens\n";
    if (data.has_norm) {
      std::vector<std::vector<std::string>> predictions;
      for (const auto& sentence : data.sentences) {
        std::vector<std::string> tokens;
        for (const auto& token : sentence.tokens) tokens.push_back(token.raw);
        predictions.push_back(tagger::tag(model, tokens));
      }
      harness::CanonicalSplit split = harness::canonical_split_eval(predictions, data);
      std::cout << "canonical accuracy ";
      if (split.acc_canonical()) std::cout << *split.acc_canonical();
      else std::cout << "n/a";
      std::cout << ", non-canonical ";
      if (split.acc_noncanonical()) std::cout << *split.acc_noncanonical();
      else std::cout << "n/a";
      std::cout << " (" << split.fraction_noncanonical() * 100 << "% non-canonical)\n";
    }
  });

  // norm-grid
  auto* normgrid = app.add_subcommand("norm-grid", "train-variant x test-mode accuracy grid");
  std::string ng_train, ng_eval, ng_model;
  tagger::TaggerConfig ng_config;
  normgrid->add_option("--train", ng_train, "token<TAB>gold<TAB>tag training file")->required();
  normgrid->add_option("--eval", ng_eval, "token<TAB>gold<TAB>tag evaluation file")->required();
  normgrid->add_option("--model", ng_model, "normalizer model directory")->required();
  add_tagger_options(normgrid, ng_config);
  normgrid->callback([&] {
    const corpus::TagSet tags = load_tagset(g);
    corpus::Dataset train = corpus::parse_norm(require_readable(ng_train, "training"), tags);
    corpus::Dataset eval_set = corpus::parse_norm(require_readable(ng_eval, "evaluation"), tags);
    normalizer::NormalizerModel model = normalizer::load(ng_model);
    harness::NormGrid grid =
        harness::run_norm_grid(train, eval_set, model, tags, ng_config, g.runs, g.seed, g.jobs);
    std::cout << grid.tsv();
    write_out(g, "norm_grid.tsv", grid.tsv());
    json j;
    for (size_t v = 0; v < grid.variants.size(); ++v)
      for (size_t m = 0; m < grid.modes.size(); ++m) j["cells"].push_back(report_json(grid.cells[v][m]));
    write_out(g, "norm_grid.json", j.dump(2) + "\n");
  });

  // embed-grid
  auto* embgrid = app.add_subcommand("embed-grid", "embedding variant x window grid");
  std::string eg_corpus, eg_train, eg_eval;
  tagger::TaggerConfig eg_config;
  embeddings::EmbeddingConfig eg_emb;
  embgrid->add_option("--corpus", eg_corpus, "token lines for embedding training")->required();
  embgrid->add_option("--train", eg_train, "tagged training file")->required();
  embgrid->add_option("--eval", eg_eval, "tagged evaluation file")->required();
  embgrid->add_option("--emb-epochs", eg_emb.epochs, "embedding training epochs");
  embgrid->add_option("--negatives", eg_emb.negatives, "negative samples");
  embgrid->add_option("--min-count", eg_emb.min_count, "embedding min count");
  embgrid->add_option("--subsample", eg_emb.subsample,
                      "frequent-word subsampling threshold (0 disables)");
  add_tagger_options(embgrid, eg_config);
  embgrid->callback([&] {
    const corpus::TagSet tags = load_tagset(g);
    corpus::Dataset train = load_tagged(eg_train, tags, "training");
    corpus::Dataset eval_set = load_tagged(eg_eval, tags, "evaluation");
    auto corpus_lines = load_token_lines(eg_corpus, "corpus");
    eg_emb.seed = g.seed;
    harness::EmbedGrid grid = harness::run_embed_grid(corpus_lines, train, eval_set, tags,
                                                      eg_config, eg_emb, g.runs, g.seed, g.jobs);
    std::cout << grid.tsv();
    write_out(g, "embed_grid.tsv", grid.tsv());
    json j;
    for (const auto& cell : grid.cells) j["cells"].push_back(report_json(cell.report));
    write_out(g, "embed_grid.json", j.dump(2) + "\n");
  });

  // self-train
  auto* selftraincmd = app.add_subcommand("self-train", "iterative pseudo-labeling from a pool");
  std::string st_train, st_pool, st_eval, st_dev, st_mask, st_strategy = "random";
  int st_iterations = 10;
  size_t st_per = 100;
  tagger::TaggerConfig st_config;
  selftraincmd->add_option("--train", st_train, "tagged training file")->required();
  selftraincmd->add_option("--pool", st_pool, "token lines pool")->required();
  selftraincmd->add_option("--eval", st_eval, "tagged evaluation file")->required();
  selftraincmd->add_option("--strategy", st_strategy, "random|dev-unknown|with-ne|without-ne");
  selftraincmd->add_option("--dev", st_dev, "tagged dev file (dev-unknown strategy)");
  selftraincmd->add_option("--mask", st_mask, "entity mask file (default: heuristic)");
  selftraincmd->add_option("--iterations", st_iterations, "max iterations");
  selftraincmd->add_option("--per-iteration", st_per, "tweets added per iteration");
  add_tagger_options(selftraincmd, st_config);
  selftraincmd->callback([&] {
    const corpus::TagSet tags = load_tagset(g);
    corpus::Dataset train = load_tagged(st_train, tags, "training");
    corpus::Dataset eval_set = load_tagged(st_eval, tags, "evaluation");
    auto pool = load_token_lines(st_pool, "pool");
    st_config.seed = g.seed;

    selftrain::SelfTrainConfig config;
    config.iterations = st_iterations;
    config.per_iteration = st_per;
    config.sampling.strategy = selftrain::strategy_from_string(st_strategy);
    config.sampling.seed = g.seed;

    std::unordered_map<std::string, uint64_t> dev_vocab, train_vocab;
    if (config.sampling.strategy == selftrain::Strategy::kDevUnknown) {
      if (st_dev.empty())
        throw Error(ErrorCode::BadArgument, "dev-unknown strategy needs --dev");
      dev_vocab = corpus::vocab(load_tagged(st_dev, tags, "dev"), 1);
      train_vocab = corpus::vocab(train, 1);
      config.sampling.dev_vocab = &dev_vocab;
      config.sampling.train_vocab = &train_vocab;
    }
    std::vector<bool> mask;
    if (config.sampling.strategy == selftrain::Strategy::kWithNe ||
        config.sampling.strategy == selftrain::Strategy::kWithoutNe) {
      mask = st_mask.empty() ? selftrain::heuristic_entity_mask(pool)
                             : selftrain::parse_entity_mask(require_readable(st_mask, "mask"));
      config.sampling.entity_mask = &mask;
    }

    selftrain::SelfTrainResult result =
        selftrain::self_train(train, pool, config, st_config, tags, eval_set);
    std::string out = "iteration\taccuracy\n";
    for (auto [iter, acc] : result.accuracy_by_iteration) {
      char buf[48];
      std::snprintf(buf, sizeof(buf), "%d\t%.4f\n", iter, acc);
      out += buf;
      std::cout << buf;
    }
    if (result.pool_exhausted) std::cout << "pool exhausted\n";
    write_out(g, "self_train.tsv", out);
  });

  // learning-curve
  auto* curvecmd = app.add_subcommand("learning-curve", "accuracy vs training fraction");
  std::string lc_train, lc_eval;
  std::vector<double> lc_fractions = {0.1, 0.25, 0.5, 0.75, 1.0};
  tagger::TaggerConfig lc_config;
  curvecmd->add_option("--train", lc_train, "tagged training file")->required();
  curvecmd->add_option("--eval", lc_eval, "tagged evaluation file")->required();
  curvecmd->add_option("--fractions", lc_fractions, "training fractions in (0,1]");
  add_tagger_options(curvecmd, lc_config);
  curvecmd->callback([&] {
    const corpus::TagSet tags = load_tagset(g);
    corpus::Dataset train = load_tagged(lc_train, tags, "training");
    corpus::Dataset eval_set = load_tagged(lc_eval, tags, "evaluation");
    lc_config.seed = g.seed;
    auto curve = selftrain::learning_curve(train, lc_fractions, g.runs, lc_config, tags, eval_set);
    std::string out = "fraction\tsentences\tmean\tstdev\n";
    for (const auto& point : curve) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "%.3f\t%zu\t%.4f\t%.4f\n", point.fraction, point.sentences,
                    point.mean, point.stdev);
      out += buf;
      std::cout << buf;
    }
    write_out(g, "learning_curve.tsv", out);
  });

  // final
  auto* finalcmd = app.add_subcommand("final", "combined systems table with significance");
  std::string fn_train, fn_model, fn_corpus;
  std::vector<std::string> fn_evals;
  int fn_rounds = 10000;
  tagger::TaggerConfig fn_config;
  embeddings::EmbeddingConfig fn_emb;
  finalcmd->add_option("--train", fn_train, "tagged training file")->required();
  finalcmd->add_option("--eval", fn_evals, "name=path tagged evaluation sets")->required();
  finalcmd->add_option("--model", fn_model, "normalizer model directory")->required();
  finalcmd->add_option("--corpus", fn_corpus, "token lines for embedding training")->required();
  finalcmd->add_option("--rounds", fn_rounds, "randomization test rounds");
  finalcmd->add_option("--emb-epochs", fn_emb.epochs, "embedding training epochs");
  finalcmd->add_option("--min-count", fn_emb.min_count, "embedding min count");
  finalcmd->add_option("--subsample", fn_emb.subsample,
                       "frequent-word subsampling threshold (0 disables)");
  add_tagger_options(finalcmd, fn_config);
  finalcmd->callback([&] {
    const corpus::TagSet tags = load_tagset(g);
    corpus::Dataset train = load_tagged(fn_train, tags, "training");
    std::vector<std::pair<std::string, corpus::Dataset>> eval_sets;
    for (const auto& entry : fn_evals) {
      size_t eq = entry.find('=');
      if (eq == std::string::npos)
        throw Error(ErrorCode::BadArgument, "--eval expects name=path, got '" + entry + "'");
      eval_sets.push_back(
          {entry.substr(0, eq), load_tagged(entry.substr(eq + 1), tags, entry.substr(0, eq))});
    }
    normalizer::NormalizerModel model = normalizer::load(fn_model);
    auto corpus_lines = load_token_lines(fn_corpus, "corpus");
    fn_emb.seed = g.seed;
    harness::FinalReport report =
        harness::run_final(train, eval_sets, model, corpus_lines, tags, fn_config, fn_emb, g.runs,
                           g.seed, fn_rounds, g.jobs);
    std::cout << report.to_tsv();
    for (const auto& note : report.notes) std::cout << note << "\n";
    write_out(g, "final.tsv", report.to_tsv());
    write_out(g, "final.json", report.to_json());
  });

  // significance
  auto* sigcmd = app.add_subcommand("significance", "paired randomization test on two outputs");
  std::string sg_a, sg_b, sg_gold;
  int sg_rounds = 10000;
  sigcmd->add_option("--a", sg_a, "token<TAB>tag predictions A")->required();
  sigcmd->add_option("--b", sg_b, "token<TAB>tag predictions B")->required();
  sigcmd->add_option("--gold", sg_gold, "token<TAB>tag gold file")->required();
  sigcmd->add_option("--rounds", sg_rounds, "randomization rounds");
  sigcmd->callback([&] {
    const corpus::TagSet tags = load_tagset(g);
    corpus::Dataset gold = load_tagged(sg_gold, tags, "gold");
    auto preds_of = [&](const std::string& path, const std::string& what) {
      corpus::Dataset data = load_tagged(path, tags, what);
      std::vector<std::vector<std::string>> preds;
      for (const auto& sentence : data.sentences) {
        std::vector<std::string> row;
        for (const auto& token : sentence.tokens) row.push_back(*token.gold_pos);
        preds.push_back(std::move(row));
      }
      return preds;
    };
    const double p = harness::significance(preds_of(sg_a, "A"), preds_of(sg_b, "B"), gold,
                                           sg_rounds, g.seed);
    std::cout << "p = " << p << "\n";
  });

  // confusion-diff
  auto* confcmd = app.add_subcommand("confusion-diff", "error-count difference matrix");
  std::string cd_a, cd_b, cd_gold;
  confcmd->add_option("--a", cd_a, "token<TAB>tag predictions A")->required();
  confcmd->add_option("--b", cd_b, "token<TAB>tag predictions B")->required();
  confcmd->add_option("--gold", cd_gold, "token<TAB>tag gold file")->required();
  confcmd->callback([&] {
    const corpus::TagSet tags = load_tagset(g);
    corpus::Dataset gold = load_tagged(cd_gold, tags, "gold");
    auto preds_of = [&](const std::string& path, const std::string& what) {
      corpus::Dataset data = load_tagged(path, tags, what);
      std::vector<std::vector<std::string>> preds;
      for (const auto& sentence : data.sentences) {
        std::vector<std::string> row;
        for (const auto& token : sentence.tokens) row.push_back(*token.gold_pos);
        preds.push_back(std::move(row));
      }
      return preds;
    };
    harness::ConfusionDiff diff =
        harness::confusion_diff(preds_of(cd_a, "A"), preds_of(cd_b, "B"), gold, tags);
    std::cout << diff.tsv();
    write_out(g, "confusion_diff.tsv", diff.tsv());
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
