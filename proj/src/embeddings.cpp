#include "normtag/embeddings.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <thread>

#include "normtag/error.hpp"

namespace normtag::embeddings {

namespace {

struct VocabInfo {
  std::vector<std::string> words;
  std::unordered_map<std::string, int> index;
  std::vector<uint64_t> counts;
  uint64_t total = 0;
};

VocabInfo build_vocab(const std::vector<std::vector<std::string>>& corpus, int min_count) {
  std::unordered_map<std::string, uint64_t> raw;
  for (const auto& sentence : corpus)
    for (const auto& token : sentence) ++raw[token];
  std::vector<std::pair<std::string, uint64_t>> kept;
  for (const auto& [word, count] : raw)
    if (count >= static_cast<uint64_t>(min_count)) kept.push_back({word, count});
  std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  VocabInfo vocab;
  for (auto& [word, count] : kept) {
    vocab.index[word] = static_cast<int>(vocab.words.size());
    vocab.words.push_back(word);
    vocab.counts.push_back(count);
    vocab.total += count;
  }
  return vocab;
}

// Cumulative unigram^0.75 weights; negatives drawn by binary search.
class NegativeSampler {
 public:
  explicit NegativeSampler(const std::vector<uint64_t>& counts) {
    cum_.reserve(counts.size());
    double run = 0.0;
    for (uint64_t c : counts) {
      run += std::pow(static_cast<double>(c), 0.75);
      cum_.push_back(run);
    }
  }

  int draw(std::mt19937_64& rng) const {
    double r = std::uniform_real_distribution<double>(0.0, cum_.back())(rng);
    return static_cast<int>(std::upper_bound(cum_.begin(), cum_.end(), r) - cum_.begin());
  }

 private:
  std::vector<double> cum_;
};

double dot_f(const float* a, const float* b, int n) {
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += static_cast<double>(a[i]) * static_cast<double>(b[i]);
  return s;
}

struct SharedState {
  const std::vector<std::vector<int>>* indexed;
  EmbeddingMatrix* emb;
  const EmbeddingConfig* config;
  const VocabInfo* vocab;
  const NegativeSampler* sampler;
  uint64_t total_positions;
  std::atomic<uint64_t> processed{0};
};

void train_range(SharedState& state, int worker, int n_workers, uint64_t seed, TrainStats* stats) {
  const EmbeddingConfig& config = *state.config;
  EmbeddingMatrix& emb = *state.emb;
  const int dim = config.dim;
  const int out_dim = emb.out_dim();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double lr0 = config.learning_rate;
  const double min_lr = lr0 / 100.0;
  const double schedule_total =
      static_cast<double>(std::max<uint64_t>(1, config.epochs * state.total_positions));
  std::vector<double> vgrad(dim);
  std::vector<int> sen;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double loss_sum = 0.0;
    uint64_t pair_count = 0;
    for (size_t si = 0; si < state.indexed->size(); ++si) {
      if (static_cast<int>(si % n_workers) != worker) continue;
      const std::vector<int>& base = (*state.indexed)[si];
      if (base.empty()) continue;

      double progress =
          static_cast<double>(state.processed.load(std::memory_order_relaxed)) / schedule_total;
      double lr = std::max(min_lr, lr0 * (1.0 - 0.99 * progress));

      sen.clear();
      for (int w : base) {
        state.processed.fetch_add(1, std::memory_order_relaxed);
        if (config.subsample > 0.0) {
          double f = static_cast<double>(state.vocab->counts[w]);
          double thresh = config.subsample * static_cast<double>(state.vocab->total);
          double keep = std::sqrt(thresh / f) + thresh / f;
          if (keep < 1.0 && unit(rng) > keep) continue;
        }
        sen.push_back(w);
      }

      const int n = static_cast<int>(sen.size());
      for (int i = 0; i < n; ++i) {
        int span = config.window > 1 ? 1 + static_cast<int>(rng() % config.window) : 1;
        for (int j = i - span; j <= i + span; ++j) {
          if (j == i || j < 0 || j >= n) continue;
          const int center = sen[i];
          const int context = sen[j];
          const int block = config.structured ? position_block(j - i, config.window) : 0;
          float* v = emb.input.data() + static_cast<size_t>(center) * dim;
          std::fill(vgrad.begin(), vgrad.end(), 0.0);

          for (int neg = 0; neg <= config.negatives; ++neg) {
            int target;
            int label;
            if (neg == 0) {
              target = context;
              label = 1;
            } else {
              target = state.sampler->draw(rng);
              label = 0;
              if (target == context) continue;
            }
            float* u = emb.output.data() + static_cast<size_t>(target) * out_dim +
                       static_cast<size_t>(block) * dim;
            PairLoss pl = sgns_pair(dot_f(u, v, dim), label);
            loss_sum += pl.loss;
            ++pair_count;
            const float step = static_cast<float>(lr * pl.dloss_ddot);
            for (int k = 0; k < dim; ++k) {
              vgrad[k] += pl.dloss_ddot * u[k];
              u[k] -= step * v[k];
            }
          }
          for (int k = 0; k < dim; ++k) v[k] -= static_cast<float>(lr * vgrad[k]);
        }
      }
    }
    if (stats) {
      stats->epoch_mean_loss.push_back(pair_count ? loss_sum / static_cast<double>(pair_count) : 0.0);
      stats->pairs_total += pair_count;
    }
  }
}

}  // namespace

PairLoss sgns_pair(double dot, int label) {
  // -log sigmoid(x) == softplus(-x), computed without overflow
  const double x = label == 1 ? dot : -dot;
  const double loss = std::max(-x, 0.0) + std::log1p(std::exp(-std::abs(x)));
  const double sig = 1.0 / (1.0 + std::exp(-dot));
  return {loss, sig - static_cast<double>(label)};
}

EmbeddingMatrix train(const std::vector<std::vector<std::string>>& corpus,
                      const EmbeddingConfig& config, TrainStats* stats) {
  if (config.dim < 1 || config.window < 1 || config.negatives < 1 || config.epochs < 1 ||
      config.min_count < 1 || config.subsample < 0.0 || config.learning_rate <= 0.0)
    throw Error(ErrorCode::BadArgument, "embedding config out of range");

  VocabInfo vocab = build_vocab(corpus, config.min_count);
  if (vocab.words.empty())
    throw Error(ErrorCode::EmptyInput, "empty effective vocabulary after min_count filtering");

  std::vector<std::vector<int>> indexed;
  indexed.reserve(corpus.size());
  uint64_t total_positions = 0;
  for (const auto& sentence : corpus) {
    std::vector<int> row;
    for (const auto& token : sentence) {
      auto it = vocab.index.find(token);
      if (it != vocab.index.end()) row.push_back(it->second);
    }
    total_positions += row.size();
    indexed.push_back(std::move(row));
  }

  EmbeddingMatrix emb;
  emb.words = vocab.words;
  emb.index = vocab.index;
  emb.dim = config.dim;
  emb.structured = config.structured;
  emb.window = config.window;
  const size_t v = emb.words.size();
  emb.input.resize(v * config.dim);
  emb.output.assign(v * emb.out_dim(), 0.0f);
  {
    std::mt19937_64 rng(config.seed);
    std::uniform_real_distribution<float> init(-0.5f / config.dim, 0.5f / config.dim);
    for (float& x : emb.input) x = init(rng);
  }

  NegativeSampler sampler(vocab.counts);
  SharedState state;
  state.indexed = &indexed;
  state.emb = &emb;
  state.config = &config;
  state.vocab = &vocab;
  state.sampler = &sampler;
  state.total_positions = total_positions;

  if (config.workers <= 1) {
    train_range(state, 0, 1, config.seed + 17, stats);
  } else {
    std::vector<std::thread> threads;
    for (int w = 0; w < config.workers; ++w)
      threads.emplace_back(train_range, std::ref(state), w, config.workers,
                           config.seed + 17 + 0x9e3779b97f4a7c15ULL * (w + 1), nullptr);
    for (auto& t : threads) t.join();
  }
  return emb;
}

std::vector<std::pair<std::string, double>> nearest(const EmbeddingMatrix& emb,
                                                    const std::string& word, int k) {
  if (k < 0) throw Error(ErrorCode::BadArgument, "k must be >= 0");
  auto it = emb.index.find(word);
  if (it == emb.index.end() || k == 0) return {};
  const int q = it->second;
  const int dim = emb.dim;
  const float* qv = emb.input_row(q);
  double qnorm = std::sqrt(dot_f(qv, qv, dim));

  std::vector<std::pair<double, int>> scored;
  scored.reserve(emb.words.size());
  for (int i = 0; i < emb.size(); ++i) {
    if (i == q) continue;
    const float* row = emb.input_row(i);
    double norm = std::sqrt(dot_f(row, row, dim));
    double denom = qnorm * norm;
    double cosine = denom > 0.0 ? dot_f(qv, row, dim) / denom : 0.0;
    scored.push_back({cosine, i});
  }
  std::sort(scored.begin(), scored.end(), [&](const auto& a, const auto& b) {
    if (a.first != b.first) return a.first > b.first;
    return emb.words[a.second] < emb.words[b.second];
  });
  if (static_cast<size_t>(k) < scored.size()) scored.resize(k);
  std::vector<std::pair<std::string, double>> result;
  result.reserve(scored.size());
  for (const auto& [cosine, i] : scored) result.push_back({emb.words[i], cosine});
  return result;
}

std::string save(const EmbeddingMatrix& emb) {
  std::string out;
  char buf[64];
  out += std::to_string(emb.size()) + " " + std::to_string(emb.dim) + "\n";
  for (int i = 0; i < emb.size(); ++i) {
    out += emb.words[i];
    const float* row = emb.input_row(i);
    for (int j = 0; j < emb.dim; ++j) {
      std::snprintf(buf, sizeof(buf), " %.6f", static_cast<double>(row[j]));
      out += buf;
    }
    out += '\n';
  }
  out += "#output ";
  out += emb.structured ? "structured " : "plain ";
  out += std::to_string(emb.window) + "\n";
  const int od = emb.out_dim();
  for (int i = 0; i < emb.size(); ++i) {
    out += emb.words[i];
    const float* row = emb.output.data() + static_cast<size_t>(i) * od;
    for (int j = 0; j < od; ++j) {
      std::snprintf(buf, sizeof(buf), " %.6f", static_cast<double>(row[j]));
      out += buf;
    }
    out += '\n';
  }
  return out;
}

namespace {

// Parses "word v1 ... vn" into row i of a flat matrix; throws with the
// 1-based line number on a malformed or wrong-width row.
std::string parse_vector_line(const std::string& line, int expected, float* dst, size_t line_no) {
  std::istringstream in(line);
  std::string word;
  if (!(in >> word))
    throw Error(ErrorCode::BadFormat, "line " + std::to_string(line_no) + ": missing word");
  int got = 0;
  std::string cell;
  while (in >> cell) {
    if (got >= expected)
      throw Error(ErrorCode::DimMismatch,
                  "line " + std::to_string(line_no) + ": more than " + std::to_string(expected) + " values");
    try {
      size_t used = 0;
      dst[got] = std::stof(cell, &used);
      if (used != cell.size()) throw std::invalid_argument(cell);
    } catch (const std::exception&) {
      throw Error(ErrorCode::BadFormat,
                  "line " + std::to_string(line_no) + ": non-numeric cell '" + cell + "'");
    }
    ++got;
  }
  if (got != expected)
    throw Error(ErrorCode::DimMismatch, "line " + std::to_string(line_no) + ": expected " +
                                            std::to_string(expected) + " values, got " + std::to_string(got));
  return word;
}

}  // namespace

EmbeddingMatrix load(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorCode::EmptyInput, "empty embedding file");
  int v = 0, dim = 0;
  {
    std::istringstream header(line);
    if (!(header >> v >> dim) || v < 1 || dim < 1)
      throw Error(ErrorCode::BadFormat, "bad header '" + line + "'");
  }
  EmbeddingMatrix emb;
  emb.dim = dim;
  emb.input.resize(static_cast<size_t>(v) * dim);
  size_t line_no = 1;
  for (int i = 0; i < v; ++i) {
    if (!std::getline(in, line))
      throw Error(ErrorCode::Truncated, "expected " + std::to_string(v) + " rows, got " + std::to_string(i));
    ++line_no;
    std::string word =
        parse_vector_line(line, dim, emb.input.data() + static_cast<size_t>(i) * dim, line_no);
    if (!emb.index.emplace(word, i).second)
      throw Error(ErrorCode::BadFormat, "line " + std::to_string(line_no) + ": duplicate word '" + word + "'");
    emb.words.push_back(std::move(word));
  }

  if (!std::getline(in, line)) {
    emb.output.assign(static_cast<size_t>(v) * dim, 0.0f);
    return emb;
  }
  ++line_no;
  if (line.rfind("#output", 0) != 0)
    throw Error(ErrorCode::BadFormat,
                "line " + std::to_string(line_no) + ": body has more rows than the header declares");
  {
    std::istringstream header(line);
    std::string tag, variant;
    int window = 0;
    if (!(header >> tag >> variant >> window) || (variant != "plain" && variant != "structured") ||
        window < 1)
      throw Error(ErrorCode::BadFormat, "line " + std::to_string(line_no) + ": bad #output header");
    emb.structured = variant == "structured";
    emb.window = window;
  }
  const int od = emb.out_dim();
  emb.output.resize(static_cast<size_t>(v) * od);
  for (int i = 0; i < v; ++i) {
    if (!std::getline(in, line))
      throw Error(ErrorCode::Truncated, "output section: expected " + std::to_string(v) + " rows");
    ++line_no;
    std::string word =
        parse_vector_line(line, od, emb.output.data() + static_cast<size_t>(i) * od, line_no);
    if (word != emb.words[i])
      throw Error(ErrorCode::BadFormat,
                  "line " + std::to_string(line_no) + ": output row order mismatch at '" + word + "'");
  }
  if (std::getline(in, line) && !line.empty())
    throw Error(ErrorCode::BadFormat, "trailing content after output section");
  return emb;
}

}  // namespace normtag::embeddings
