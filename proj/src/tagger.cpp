#include "normtag/tagger.hpp"

#include <algorithm>
#include <cmath>

#include "normtag/bytes.hpp"
#include "normtag/error.hpp"

namespace normtag::tagger {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;

double sigmoid(double v) { return 1.0 / (1.0 + std::exp(-v)); }

// 53-bit uniform in [0,1); hand-rolled so initialization is identical
// across standard libraries.
double uniform_unit(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * (1.0 / 9007199254740992.0);
}

void fill_uniform(MatrixXd& m, std::mt19937_64& rng) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = uniform_unit(rng) * 0.2 - 0.1;
}

// Per-step activations kept for backpropagation.
struct LstmTrace {
  std::vector<VectorXd> xs, is, fs, gs, os, cs, hs, tanhcs;
};

std::vector<VectorXd> lstm_run(const LstmParams& p, const std::vector<VectorXd>& xs,
                               LstmTrace* trace) {
  const int h = static_cast<int>(p.U.cols());
  VectorXd c = VectorXd::Zero(h);
  VectorXd hv = VectorXd::Zero(h);
  std::vector<VectorXd> hs;
  hs.reserve(xs.size());
  for (const VectorXd& x : xs) {
    VectorXd z = p.W * x + p.U * hv + p.b.col(0);
    VectorXd i = z.segment(0, h).unaryExpr(&sigmoid);
    VectorXd f = z.segment(h, h).unaryExpr(&sigmoid);
    VectorXd g = z.segment(2 * h, h).array().tanh();
    VectorXd o = z.segment(3 * h, h).unaryExpr(&sigmoid);
    VectorXd c_new = (f.array() * c.array() + i.array() * g.array()).matrix();
    VectorXd tanhc = c_new.array().tanh();
    VectorXd h_new = (o.array() * tanhc.array()).matrix();
    if (trace) {
      trace->xs.push_back(x);
      trace->is.push_back(i);
      trace->fs.push_back(f);
      trace->gs.push_back(g);
      trace->os.push_back(o);
      trace->cs.push_back(c_new);
      trace->hs.push_back(h_new);
      trace->tanhcs.push_back(tanhc);
    }
    c = std::move(c_new);
    hv = h_new;
    hs.push_back(std::move(h_new));
  }
  return hs;
}

// dhs[t] is the gradient flowing into h[t] from above; returns input
// gradients and accumulates parameter gradients into gW/gU/gb.
std::vector<VectorXd> lstm_backward(const LstmParams& p, const LstmTrace& t,
                                    const std::vector<VectorXd>& dhs, MatrixXd& gW, MatrixXd& gU,
                                    MatrixXd& gb) {
  const int h = static_cast<int>(p.U.cols());
  const int steps = static_cast<int>(t.xs.size());
  std::vector<VectorXd> dxs(steps);
  VectorXd dc_next = VectorXd::Zero(h);
  VectorXd dh_next = VectorXd::Zero(h);
  for (int s = steps - 1; s >= 0; --s) {
    const VectorXd dh = dhs[s] + dh_next;
    const VectorXd& i = t.is[s];
    const VectorXd& f = t.fs[s];
    const VectorXd& g = t.gs[s];
    const VectorXd& o = t.os[s];
    const VectorXd& tanhc = t.tanhcs[s];
    const VectorXd c_prev = s > 0 ? t.cs[s - 1] : VectorXd::Zero(h);
    const VectorXd h_prev = s > 0 ? t.hs[s - 1] : VectorXd::Zero(h);

    VectorXd dc = (dh.array() * o.array() * (1.0 - tanhc.array().square())).matrix() + dc_next;
    VectorXd da(4 * h);
    da.segment(0, h) = (dc.array() * g.array() * i.array() * (1.0 - i.array())).matrix();
    da.segment(h, h) = (dc.array() * c_prev.array() * f.array() * (1.0 - f.array())).matrix();
    da.segment(2 * h, h) = (dc.array() * i.array() * (1.0 - g.array().square())).matrix();
    da.segment(3 * h, h) =
        (dh.array() * tanhc.array() * o.array() * (1.0 - o.array())).matrix();

    gW.noalias() += da * t.xs[s].transpose();
    gU.noalias() += da * h_prev.transpose();
    gb.col(0) += da;
    dxs[s] = p.W.transpose() * da;
    dh_next = p.U.transpose() * da;
    dc_next = (dc.array() * f.array()).matrix();
  }
  return dxs;
}

struct CharRun {
  std::vector<int> ids;
  LstmTrace fwd;  // over ids in order
  LstmTrace bwd;  // over ids reversed
};

struct Cache {
  std::vector<int> word_ids;
  std::vector<CharRun> chars;
  std::vector<std::vector<VectorXd>> layer_in;  // input sequence per layer
  std::vector<LstmTrace> wf, wb;                // wb traces run over reversed input
  std::vector<VectorXd> top;                    // 2*word_hidden per token
  MatrixXd logp;
  MatrixXd probs;
};

std::vector<VectorXd> char_embed(const TaggerModel& model, const std::vector<int>& ids) {
  std::vector<VectorXd> xs;
  xs.reserve(ids.size());
  for (int id : ids) xs.push_back(model.char_table.row(id).transpose());
  return xs;
}

void forward_internal(const TaggerModel& model, const std::vector<std::string>& tokens,
                      std::mt19937_64* noise_rng, Cache& cache) {
  if (tokens.empty()) throw Error(ErrorCode::EmptyInput, "empty sentence");
  const TaggerConfig& cfg = model.config;
  const int n = static_cast<int>(tokens.size());

  std::normal_distribution<double> noise(0.0, cfg.noise_sigma > 0.0 ? cfg.noise_sigma : 1.0);
  std::vector<VectorXd> inputs;
  inputs.reserve(n);
  cache.word_ids.resize(n);
  cache.chars.resize(n);
  for (int t = 0; t < n; ++t) {
    cache.word_ids[t] = model.word_id(tokens[t]);
    CharRun& run = cache.chars[t];
    run.ids.reserve(tokens[t].size());
    for (unsigned char c : tokens[t]) run.ids.push_back(model.char_id(c));
    std::vector<VectorXd> xs = char_embed(model, run.ids);
    std::vector<VectorXd> hs_f = lstm_run(model.char_fwd, xs, &run.fwd);
    std::reverse(xs.begin(), xs.end());
    std::vector<VectorXd> hs_b = lstm_run(model.char_bwd, xs, &run.bwd);

    VectorXd in(cfg.word_dim + 2 * cfg.char_dim);
    in.segment(0, cfg.word_dim) = model.word_table.row(cache.word_ids[t]).transpose();
    in.segment(cfg.word_dim, cfg.char_dim) =
        hs_f.empty() ? VectorXd::Zero(cfg.char_dim) : hs_f.back();
    in.segment(cfg.word_dim + cfg.char_dim, cfg.char_dim) =
        hs_b.empty() ? VectorXd::Zero(cfg.char_dim) : hs_b.back();
    if (noise_rng && cfg.noise_sigma > 0.0)
      for (Eigen::Index k = 0; k < in.size(); ++k) in[k] += noise(*noise_rng);
    inputs.push_back(std::move(in));
  }

  cache.wf.resize(cfg.layers);
  cache.wb.resize(cfg.layers);
  std::vector<VectorXd> cur = std::move(inputs);
  for (int l = 0; l < cfg.layers; ++l) {
    cache.layer_in.push_back(cur);
    std::vector<VectorXd> hs_f = lstm_run(model.word_fwd[l], cur, &cache.wf[l]);
    std::reverse(cur.begin(), cur.end());
    std::vector<VectorXd> hs_b_rev = lstm_run(model.word_bwd[l], cur, &cache.wb[l]);
    std::vector<VectorXd> next(n);
    for (int t = 0; t < n; ++t) {
      VectorXd both(2 * cfg.word_hidden);
      both.segment(0, cfg.word_hidden) = hs_f[t];
      both.segment(cfg.word_hidden, cfg.word_hidden) = hs_b_rev[n - 1 - t];
      next[t] = std::move(both);
    }
    cur = std::move(next);
  }
  cache.top = std::move(cur);

  const int k = model.tags.size();
  cache.logp.resize(n, k);
  cache.probs.resize(n, k);
  for (int t = 0; t < n; ++t) {
    VectorXd logits = model.out_w * cache.top[t] + model.out_b.col(0);
    const double max_logit = logits.maxCoeff();
    const double lse = max_logit + std::log((logits.array() - max_logit).exp().sum());
    cache.logp.row(t) = (logits.array() - lse).transpose();
    cache.probs.row(t) = cache.logp.row(t).array().exp();
  }
}

Gradients zero_like(const TaggerModel& model) {
  Gradients grads;
  for (const MatrixXd* t : tensors(model)) grads.push_back(MatrixXd::Zero(t->rows(), t->cols()));
  return grads;
}

}  // namespace

int TaggerModel::word_id(const std::string& word) const {
  auto it = word_index.find(word);
  return it == word_index.end() ? 0 : it->second;
}

std::vector<Eigen::MatrixXd*> tensors(TaggerModel& m) {
  std::vector<MatrixXd*> out = {&m.word_table, &m.char_table, &m.char_fwd.W, &m.char_fwd.U,
                                &m.char_fwd.b, &m.char_bwd.W, &m.char_bwd.U, &m.char_bwd.b};
  for (size_t l = 0; l < m.word_fwd.size(); ++l) {
    out.push_back(&m.word_fwd[l].W);
    out.push_back(&m.word_fwd[l].U);
    out.push_back(&m.word_fwd[l].b);
    out.push_back(&m.word_bwd[l].W);
    out.push_back(&m.word_bwd[l].U);
    out.push_back(&m.word_bwd[l].b);
  }
  out.push_back(&m.out_w);
  out.push_back(&m.out_b);
  return out;
}

std::vector<const Eigen::MatrixXd*> tensors(const TaggerModel& m) {
  std::vector<MatrixXd*> mut = tensors(const_cast<TaggerModel&>(m));
  return {mut.begin(), mut.end()};
}

TaggerModel init(const TaggerConfig& config, const corpus::TagSet& tags,
                 const std::unordered_map<std::string, uint64_t>& train_vocab,
                 const embeddings::EmbeddingMatrix* pretrained) {
  if (config.epochs < 1 || config.layers < 1 || config.word_dim < 1 || config.char_dim < 1 ||
      config.word_hidden < 1 || config.noise_sigma < 0.0 || config.learning_rate <= 0.0 ||
      config.unk_threshold < 1)
    throw Error(ErrorCode::BadArgument, "tagger config out of range");
  if (tags.size() < 1) throw Error(ErrorCode::EmptyInput, "empty tagset");
  if (pretrained && pretrained->dim != config.word_dim)
    throw Error(ErrorCode::DimMismatch,
                "pretrained dim " + std::to_string(pretrained->dim) + " vs word_dim " +
                    std::to_string(config.word_dim));

  TaggerModel model;
  model.config = config;
  model.tags = tags;

  for (const auto& [word, count] : train_vocab)
    if (count >= static_cast<uint64_t>(config.unk_threshold)) model.vocab_words.push_back(word);
  std::sort(model.vocab_words.begin(), model.vocab_words.end());
  for (size_t i = 0; i < model.vocab_words.size(); ++i)
    model.word_index[model.vocab_words[i]] = static_cast<int>(i) + 1;

  // Character inventory from every training word, below-threshold ones
  // included: their characters are still training signal.
  bool seen[256] = {};
  for (const auto& [word, count] : train_vocab)
    for (unsigned char c : word) seen[c] = true;
  std::fill(std::begin(model.char_index), std::end(model.char_index), 0);
  for (int c = 0; c < 256; ++c)
    if (seen[c]) {
      model.char_list.push_back(static_cast<unsigned char>(c));
      model.char_index[c] = static_cast<int>(model.char_list.size());
    }

  const int vw = static_cast<int>(model.vocab_words.size());
  const int vc = static_cast<int>(model.char_list.size());
  const int cd = config.char_dim;
  const int wh = config.word_hidden;
  model.word_table.resize(vw + 1, config.word_dim);
  model.char_table.resize(vc + 1, cd);
  model.char_fwd = {MatrixXd(4 * cd, cd), MatrixXd(4 * cd, cd), MatrixXd(4 * cd, 1)};
  model.char_bwd = model.char_fwd;
  model.word_fwd.resize(config.layers);
  model.word_bwd.resize(config.layers);
  for (int l = 0; l < config.layers; ++l) {
    const int in_dim = l == 0 ? config.word_dim + 2 * cd : 2 * wh;
    model.word_fwd[l] = {MatrixXd(4 * wh, in_dim), MatrixXd(4 * wh, wh), MatrixXd(4 * wh, 1)};
    model.word_bwd[l] = model.word_fwd[l];
  }
  model.out_w.resize(tags.size(), 2 * wh);
  model.out_b.resize(tags.size(), 1);

  std::mt19937_64 rng(config.seed);
  for (MatrixXd* t : tensors(model)) fill_uniform(*t, rng);

  if (pretrained) {
    for (size_t i = 0; i < model.vocab_words.size(); ++i) {
      auto it = pretrained->index.find(model.vocab_words[i]);
      if (it == pretrained->index.end()) continue;
      const float* row = pretrained->input_row(it->second);
      for (int d = 0; d < config.word_dim; ++d)
        model.word_table(static_cast<Eigen::Index>(i) + 1, d) = static_cast<double>(row[d]);
    }
  }
  return model;
}

Eigen::MatrixXd forward(const TaggerModel& model, const std::vector<std::string>& tokens) {
  Cache cache;
  forward_internal(model, tokens, nullptr, cache);
  return cache.logp;
}

double loss_and_grads(const TaggerModel& model, const corpus::Sentence& sentence, Gradients& grads,
                      std::mt19937_64* noise_rng) {
  std::vector<std::string> tokens;
  std::vector<int> gold;
  for (const auto& token : sentence.tokens) {
    if (!token.gold_pos)
      throw Error(ErrorCode::MissingLayer, "sentence " + sentence.id + " lacks gold tags");
    tokens.push_back(token.raw);
    gold.push_back(model.tags.index_of(*token.gold_pos));
  }

  Cache cache;
  forward_internal(model, tokens, noise_rng, cache);
  const int n = static_cast<int>(tokens.size());
  const TaggerConfig& cfg = model.config;

  grads = zero_like(model);
  // Tensor order: word, char, char_fwd(3), char_bwd(3), per layer
  // word_fwd(3)+word_bwd(3), out_w, out_b.
  const int layer_base = 8;
  MatrixXd& g_out_w = grads[layer_base + 6 * cfg.layers];
  MatrixXd& g_out_b = grads[layer_base + 6 * cfg.layers + 1];

  double loss = 0.0;
  std::vector<VectorXd> dtop(n);
  for (int t = 0; t < n; ++t) {
    loss -= cache.logp(t, gold[t]);
    VectorXd dlogit = cache.probs.row(t).transpose();
    dlogit[gold[t]] -= 1.0;
    dlogit /= static_cast<double>(n);
    g_out_w.noalias() += dlogit * cache.top[t].transpose();
    g_out_b.col(0) += dlogit;
    dtop[t] = model.out_w.transpose() * dlogit;
  }
  loss /= static_cast<double>(n);

  for (int l = cfg.layers - 1; l >= 0; --l) {
    std::vector<VectorXd> dh_f(n), dh_b(n);
    for (int t = 0; t < n; ++t) {
      dh_f[t] = dtop[t].segment(0, cfg.word_hidden);
      // backward trace runs over the reversed sentence
      dh_b[n - 1 - t] = dtop[t].segment(cfg.word_hidden, cfg.word_hidden);
    }
    const int base = layer_base + 6 * l;
    std::vector<VectorXd> dx_f = lstm_backward(model.word_fwd[l], cache.wf[l], dh_f,
                                               grads[base + 0], grads[base + 1], grads[base + 2]);
    std::vector<VectorXd> dx_b = lstm_backward(model.word_bwd[l], cache.wb[l], dh_b,
                                               grads[base + 3], grads[base + 4], grads[base + 5]);
    for (int t = 0; t < n; ++t) dtop[t] = dx_f[t] + dx_b[n - 1 - t];
  }

  for (int t = 0; t < n; ++t) {
    const VectorXd& din = dtop[t];
    grads[0].row(cache.word_ids[t]) += din.segment(0, cfg.word_dim).transpose();
    const CharRun& run = cache.chars[t];
    const int len = static_cast<int>(run.ids.size());
    if (len == 0) continue;
    std::vector<VectorXd> dh_cf(len, VectorXd::Zero(cfg.char_dim));
    std::vector<VectorXd> dh_cb(len, VectorXd::Zero(cfg.char_dim));
    dh_cf[len - 1] = din.segment(cfg.word_dim, cfg.char_dim);
    dh_cb[len - 1] = din.segment(cfg.word_dim + cfg.char_dim, cfg.char_dim);
    std::vector<VectorXd> dxc_f =
        lstm_backward(model.char_fwd, run.fwd, dh_cf, grads[2], grads[3], grads[4]);
    std::vector<VectorXd> dxc_b =
        lstm_backward(model.char_bwd, run.bwd, dh_cb, grads[5], grads[6], grads[7]);
    for (int k = 0; k < len; ++k)
      grads[1].row(run.ids[k]) += (dxc_f[k] + dxc_b[len - 1 - k]).transpose();
  }
  return loss;
}

TaggerModel train(TaggerModel model, const corpus::Dataset& data, TrainStats* stats) {
  if (data.sentences.empty()) throw Error(ErrorCode::EmptyInput, "empty training set");
  if (!data.has_pos) throw Error(ErrorCode::MissingLayer, "training needs gold tags");
  const TaggerConfig& cfg = model.config;

  Gradients m_state, v_state;
  for (const MatrixXd* t : tensors(model)) {
    m_state.push_back(MatrixXd::Zero(t->rows(), t->cols()));
    v_state.push_back(MatrixXd::Zero(t->rows(), t->cols()));
  }
  int64_t step = 0;

  std::mt19937_64 rng(cfg.seed ^ 0x7261696e65724cULL);
  std::vector<size_t> order(data.sentences.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;

  Gradients grads;
  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    // Fisher-Yates, high to low, deterministic across standard libraries.
    for (size_t i = order.size(); i > 1; --i)
      std::swap(order[i - 1], order[rng() % i]);

    double loss_sum = 0.0;
    for (size_t idx : order) {
      loss_sum += loss_and_grads(model, data.sentences[idx], grads, &rng);
      ++step;
      const double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
      const double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
      std::vector<MatrixXd*> params = tensors(model);
      for (size_t p = 0; p < params.size(); ++p) {
        if (p == 0 && !cfg.update_embeddings) continue;
        m_state[p] = cfg.beta1 * m_state[p] + (1.0 - cfg.beta1) * grads[p];
        v_state[p] = cfg.beta2 * v_state[p] + (1.0 - cfg.beta2) * grads[p].cwiseProduct(grads[p]);
        params[p]->array() -= cfg.learning_rate * (m_state[p].array() / bc1) /
                              ((v_state[p].array() / bc2).sqrt() + cfg.epsilon);
      }
    }
    if (stats)
      stats->epoch_mean_loss.push_back(loss_sum / static_cast<double>(data.sentences.size()));
  }
  return model;
}

std::vector<std::string> tag(const TaggerModel& model, const std::vector<std::string>& tokens) {
  if (tokens.empty()) return {};
  MatrixXd logp = forward(model, tokens);
  std::vector<std::string> out;
  out.reserve(tokens.size());
  for (Eigen::Index t = 0; t < logp.rows(); ++t) {
    int best = 0;
    for (int k = 1; k < model.tags.size(); ++k)
      if (logp(t, k) > logp(t, best)) best = k;
    out.push_back(model.tags.label(best));
  }
  return out;
}

double evaluate(const TaggerModel& model, const corpus::Dataset& data) {
  if (data.sentences.empty()) throw Error(ErrorCode::EmptyInput, "empty evaluation set");
  if (!data.has_pos) throw Error(ErrorCode::MissingLayer, "evaluation needs gold tags");
  uint64_t correct = 0, total = 0;
  for (const auto& sentence : data.sentences) {
    std::vector<std::string> tokens;
    for (const auto& token : sentence.tokens) tokens.push_back(token.raw);
    std::vector<std::string> predicted = tag(model, tokens);
    for (size_t i = 0; i < predicted.size(); ++i) {
      total += 1;
      if (predicted[i] == *sentence.tokens[i].gold_pos) correct += 1;
    }
  }
  return total ? static_cast<double>(correct) / static_cast<double>(total) : 0.0;
}

std::string save(const TaggerModel& model) {
  std::string out = "NTTG";
  bytes::put<uint32_t>(out, 1);  // format version
  const TaggerConfig& c = model.config;
  bytes::put<int32_t>(out, c.epochs);
  bytes::put<int32_t>(out, c.layers);
  bytes::put<int32_t>(out, c.word_dim);
  bytes::put<int32_t>(out, c.char_dim);
  bytes::put<int32_t>(out, c.word_hidden);
  bytes::put<int32_t>(out, c.unk_threshold);
  bytes::put<double>(out, c.noise_sigma);
  bytes::put<double>(out, c.learning_rate);
  bytes::put<double>(out, c.beta1);
  bytes::put<double>(out, c.beta2);
  bytes::put<double>(out, c.epsilon);
  bytes::put<uint8_t>(out, c.update_embeddings ? 1 : 0);
  bytes::put<uint64_t>(out, c.seed);

  bytes::put<uint32_t>(out, static_cast<uint32_t>(model.tags.size()));
  for (const auto& label : model.tags.labels()) bytes::put_string(out, label);
  bytes::put<uint32_t>(out, static_cast<uint32_t>(model.vocab_words.size()));
  for (const auto& word : model.vocab_words) bytes::put_string(out, word);
  bytes::put<uint32_t>(out, static_cast<uint32_t>(model.char_list.size()));
  for (unsigned char ch : model.char_list) bytes::put<uint8_t>(out, ch);

  for (const MatrixXd* t : tensors(model)) {
    bytes::put<uint32_t>(out, static_cast<uint32_t>(t->rows()));
    bytes::put<uint32_t>(out, static_cast<uint32_t>(t->cols()));
    for (Eigen::Index r = 0; r < t->rows(); ++r)
      for (Eigen::Index col = 0; col < t->cols(); ++col) bytes::put<double>(out, (*t)(r, col));
  }
  return out;
}

TaggerModel load(const std::string& payload) {
  if (payload.empty()) throw Error(ErrorCode::EmptyInput, "empty tagger payload");
  bytes::Reader in(payload);
  char magic[4];
  for (char& c : magic) c = in.get<char>();
  if (std::string(magic, 4) != "NTTG") throw Error(ErrorCode::BadFormat, "bad tagger magic");
  const uint32_t version = in.get<uint32_t>();
  if (version != 1)
    throw Error(ErrorCode::VersionMismatch, "tagger format version " + std::to_string(version) +
                                                ", this build reads version 1");
  TaggerConfig c;
  c.epochs = in.get<int32_t>();
  c.layers = in.get<int32_t>();
  c.word_dim = in.get<int32_t>();
  c.char_dim = in.get<int32_t>();
  c.word_hidden = in.get<int32_t>();
  c.unk_threshold = in.get<int32_t>();
  c.noise_sigma = in.get<double>();
  c.learning_rate = in.get<double>();
  c.beta1 = in.get<double>();
  c.beta2 = in.get<double>();
  c.epsilon = in.get<double>();
  c.update_embeddings = in.get<uint8_t>() != 0;
  c.seed = in.get<uint64_t>();
  if (c.layers < 1 || c.word_dim < 1 || c.char_dim < 1 || c.word_hidden < 1)
    throw Error(ErrorCode::BadFormat, "bad tagger config header");

  const uint32_t n_tags = in.get<uint32_t>();
  std::vector<std::string> labels(n_tags);
  for (auto& label : labels) label = in.get_string();

  TaggerModel model;
  model.config = c;
  model.tags = corpus::TagSet(labels);
  const uint32_t n_words = in.get<uint32_t>();
  model.vocab_words.resize(n_words);
  for (auto& word : model.vocab_words) word = in.get_string();
  for (size_t i = 0; i < model.vocab_words.size(); ++i)
    model.word_index[model.vocab_words[i]] = static_cast<int>(i) + 1;
  const uint32_t n_chars = in.get<uint32_t>();
  std::fill(std::begin(model.char_index), std::end(model.char_index), 0);
  for (uint32_t i = 0; i < n_chars; ++i) {
    unsigned char ch = in.get<uint8_t>();
    model.char_list.push_back(ch);
    model.char_index[ch] = static_cast<int>(i) + 1;
  }

  model.word_fwd.resize(c.layers);
  model.word_bwd.resize(c.layers);
  for (MatrixXd* t : tensors(model)) {
    const uint32_t rows = in.get<uint32_t>();
    const uint32_t cols = in.get<uint32_t>();
    t->resize(rows, cols);
    for (uint32_t r = 0; r < rows; ++r)
      for (uint32_t col = 0; col < cols; ++col) (*t)(r, col) = in.get<double>();
  }
  if (!in.done()) throw Error(ErrorCode::BadFormat, "trailing bytes after tagger payload");

  // Shape sanity for the tensors whose dims the config implies.
  if (model.word_table.rows() != static_cast<Eigen::Index>(n_words) + 1 ||
      model.word_table.cols() != c.word_dim ||
      model.out_w.rows() != static_cast<Eigen::Index>(n_tags) ||
      model.out_w.cols() != 2 * c.word_hidden)
    throw Error(ErrorCode::DimMismatch, "tagger tensor shapes disagree with header");
  return model;
}

}  // namespace normtag::tagger
