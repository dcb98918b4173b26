#include "blcs/relation_net/training.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <unordered_map>

#include "blcs/common/error.hpp"

namespace blcs::rn {

namespace {

using Mat = Eigen::MatrixXd;

double softplus(double z) { return std::max(z, 0.0) + std::log1p(std::exp(-std::abs(z))); }

double bce_from_logit(double z, int label) { return softplus(z) - static_cast<double>(label) * z; }

// Token ids of one sample, ordered (identification, behavior, status).
struct IndexedSample {
  std::vector<std::array<int, 3>> triples;
  int label = 1;
};

IndexedSample index_sample(const Vocabulary& vocab, const TrainSample& s) {
  IndexedSample out;
  out.label = s.label;
  out.triples.reserve(s.triples.size());
  for (const auto& t : s.triples)
    out.triples.push_back({vocab.index_of(t.identification), vocab.index_of(t.behavior), vocab.index_of(t.status)});
  return out;
}

struct LstmTrace {
  std::vector<Mat> x, i, f, o, g, c, tc, h;
};

int safe_token(const EncoderParams& p, int tok) { return tok < 0 || tok >= p.vocab_size() ? 0 : tok; }

LstmTrace lstm_forward(const EncoderParams& p, const std::vector<std::array<int, 2>>& seqs) {
  const auto n = static_cast<Eigen::Index>(seqs.size());
  LstmTrace tr;
  Mat h = Mat::Zero(kLstmHidden, n);
  Mat c = Mat::Zero(kLstmHidden, n);
  for (int t = 0; t < 2; ++t) {
    Mat x(p.input_dim(), n);
    for (Eigen::Index u = 0; u < n; ++u)
      x.col(u) = p.embedding.row(safe_token(p, seqs[static_cast<std::size_t>(u)][static_cast<std::size_t>(t)])).transpose();
    auto pre = [&](int gi) {
      const auto& gate = p.gates[static_cast<std::size_t>(gi)];
      Mat z = gate.input_weights.transpose() * x + gate.recurrent_weights.transpose() * h;
      z.colwise() += gate.bias;
      return z;
    };
    Mat ig = activate(Activation::sigmoid, pre(kInputGate));
    Mat fg = activate(Activation::sigmoid, pre(kForgetGate));
    Mat og = activate(Activation::sigmoid, pre(kOutputGate));
    Mat gg = activate(Activation::tanh, pre(kCandidateGate));
    c = (fg.array() * c.array() + ig.array() * gg.array()).matrix();
    Mat tc = c.array().tanh().matrix();
    h = (og.array() * tc.array()).matrix();
    tr.x.push_back(std::move(x));
    tr.i.push_back(std::move(ig));
    tr.f.push_back(std::move(fg));
    tr.o.push_back(std::move(og));
    tr.g.push_back(std::move(gg));
    tr.c.push_back(c);
    tr.tc.push_back(std::move(tc));
    tr.h.push_back(h);
  }
  return tr;
}

void lstm_backward(const EncoderParams& p, const std::vector<std::array<int, 2>>& seqs, const LstmTrace& tr, Mat dh,
                   EncoderParams& grad) {
  const auto n = static_cast<Eigen::Index>(seqs.size());
  Mat dc = Mat::Zero(kLstmHidden, n);
  const Mat zero = Mat::Zero(kLstmHidden, n);
  for (int t = 1; t >= 0; --t) {
    const auto st = static_cast<std::size_t>(t);
    const Mat& c_prev = t > 0 ? tr.c[st - 1] : zero;
    const Mat& h_prev = t > 0 ? tr.h[st - 1] : zero;
    const auto i = tr.i[st].array();
    const auto f = tr.f[st].array();
    const auto o = tr.o[st].array();
    const auto g = tr.g[st].array();
    const auto tc = tr.tc[st].array();

    Mat d_o = (dh.array() * tc).matrix();
    dc = (dc.array() + dh.array() * o * (1.0 - tc.square())).matrix();
    std::array<Mat, 4> dz;
    dz[kInputGate] = (dc.array() * g * i * (1.0 - i)).matrix();
    dz[kForgetGate] = (dc.array() * c_prev.array() * f * (1.0 - f)).matrix();
    dz[kOutputGate] = (d_o.array() * o * (1.0 - o)).matrix();
    dz[kCandidateGate] = (dc.array() * i * (1.0 - g.square())).matrix();
    dc = (dc.array() * f).matrix();

    Mat dx = Mat::Zero(p.input_dim(), n);
    Mat dh_prev = Mat::Zero(kLstmHidden, n);
    for (std::size_t k = 0; k < 4; ++k) {
      const auto& gate = p.gates[k];
      auto& gg = grad.gates[k];
      gg.input_weights.noalias() += tr.x[st] * dz[k].transpose();
      gg.recurrent_weights.noalias() += h_prev * dz[k].transpose();
      gg.bias += dz[k].rowwise().sum();
      dx.noalias() += gate.input_weights * dz[k];
      dh_prev.noalias() += gate.recurrent_weights * dz[k];
    }
    for (Eigen::Index u = 0; u < n; ++u)
      grad.embedding.row(safe_token(p, seqs[static_cast<std::size_t>(u)][st])) += dx.col(u).transpose();
    dh = std::move(dh_prev);
  }
}

struct MlpTrace {
  std::vector<Mat> a;  // a[0] input, a[l + 1] output of layer l
  std::vector<Mat> z;
};

MlpTrace mlp_forward(const Mlp& mlp, Mat x, bool final_activation) {
  MlpTrace tr;
  tr.a.push_back(std::move(x));
  for (std::size_t l = 0; l < mlp.layers.size(); ++l) {
    const auto& layer = mlp.layers[l];
    Mat z = layer.weights * tr.a.back();
    z.colwise() += layer.bias;
    bool raw = l + 1 == mlp.layers.size() && !final_activation;
    Mat a = raw ? z : activate(layer.activation, z);
    tr.z.push_back(std::move(z));
    tr.a.push_back(std::move(a));
  }
  return tr;
}

Mat mlp_backward(const Mlp& mlp, const MlpTrace& tr, Mat d, bool final_activation, Mlp& grad) {
  for (std::size_t l = mlp.layers.size(); l-- > 0;) {
    const auto& layer = mlp.layers[l];
    bool raw = l + 1 == mlp.layers.size() && !final_activation;
    Mat dz = raw ? d : Mat((d.array() * activation_derivative(layer.activation, tr.z[l], tr.a[l + 1]).array()).matrix());
    grad.layers[l].weights.noalias() += dz * tr.a[l].transpose();
    grad.layers[l].bias += dz.rowwise().sum();
    d = layer.weights.transpose() * dz;
  }
  return d;
}

RnModel zero_like(const RnModel& m) {
  RnModel g = m;
  for (auto& b : parameter_blocks(g)) std::fill(b.data, b.data + b.size, 0.0);
  return g;
}

// Mean loss over the batch; accumulates d(mean loss)/d(param) into `grad`.
double batch_gradients(const RnModel& m, const std::vector<const IndexedSample*>& batch, RnModel& grad) {
  const int vocab = m.encoder.vocab_size();
  const int tag_i = m.vocab.index_of(Vocabulary::tag(kb::Base::identification));
  const int tag_b = m.vocab.index_of(Vocabulary::tag(kb::Base::behavior));
  const int tag_s = m.vocab.index_of(Vocabulary::tag(kb::Base::status));
  const int tags[3] = {tag_i, tag_b, tag_s};

  std::unordered_map<int, int> column;  // slot * vocab + token -> LSTM batch column
  std::vector<std::array<int, 2>> seqs;
  std::vector<std::array<int, 3>> triple_cols;
  std::vector<int> owner;
  for (std::size_t b = 0; b < batch.size(); ++b) {
    for (const auto& t : batch[b]->triples) {
      std::array<int, 3> cols{};
      for (int slot = 0; slot < 3; ++slot) {
        int tok = t[static_cast<std::size_t>(slot)];
        if (tok < 0 || tok >= vocab) tok = 0;
        auto [it, fresh] = column.try_emplace(slot * vocab + tok, static_cast<int>(seqs.size()));
        if (fresh) seqs.push_back({tags[slot], tok});
        cols[static_cast<std::size_t>(slot)] = it->second;
      }
      triple_cols.push_back(cols);
      owner.push_back(static_cast<int>(b));
    }
  }

  const LstmTrace lt = lstm_forward(m.encoder, seqs);
  const Mat& enc = lt.h.back();
  const auto n_triples = static_cast<Eigen::Index>(triple_cols.size());
  const auto n_batch = static_cast<Eigen::Index>(batch.size());
  Mat gin(3 * kLstmHidden, n_triples);
  for (Eigen::Index j = 0; j < n_triples; ++j)
    for (int slot = 0; slot < 3; ++slot)
      gin.block(slot * kLstmHidden, j, kLstmHidden, 1) = enc.col(triple_cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(slot)]);

  const MlpTrace gt = mlp_forward(m.rn.g_theta, std::move(gin), true);
  const Mat& rel = gt.a.back();
  Mat sums = Mat::Zero(rel.rows(), n_batch);
  for (Eigen::Index j = 0; j < n_triples; ++j) sums.col(owner[static_cast<std::size_t>(j)]) += rel.col(j);

  const MlpTrace ft = mlp_forward(m.rn.f_phi, std::move(sums), false);
  const Mat& logits = ft.a.back();
  double loss = 0.0;
  Mat dlogit(1, n_batch);
  for (Eigen::Index b = 0; b < n_batch; ++b) {
    const double z = logits(0, b);
    const int y = batch[static_cast<std::size_t>(b)]->label;
    loss += bce_from_logit(z, y);
    const double p = 1.0 / (1.0 + std::exp(-z));
    dlogit(0, b) = (p - static_cast<double>(y)) / static_cast<double>(n_batch);
  }
  loss /= static_cast<double>(n_batch);

  const Mat dsums = mlp_backward(m.rn.f_phi, ft, std::move(dlogit), false, grad.rn.f_phi);
  Mat drel(rel.rows(), n_triples);
  for (Eigen::Index j = 0; j < n_triples; ++j) drel.col(j) = dsums.col(owner[static_cast<std::size_t>(j)]);
  const Mat dgin = mlp_backward(m.rn.g_theta, gt, std::move(drel), true, grad.rn.g_theta);

  Mat denc = Mat::Zero(kLstmHidden, static_cast<Eigen::Index>(seqs.size()));
  for (Eigen::Index j = 0; j < n_triples; ++j)
    for (int slot = 0; slot < 3; ++slot)
      denc.col(triple_cols[static_cast<std::size_t>(j)][static_cast<std::size_t>(slot)]) +=
          dgin.block(slot * kLstmHidden, j, kLstmHidden, 1);
  lstm_backward(m.encoder, seqs, lt, std::move(denc), grad.encoder);
  return loss;
}

void check_data(std::span<const TrainSample> data) {
  if (data.empty()) throw InvalidInput("train: empty dataset");
  for (const auto& s : data) {
    if (s.triples.empty()) throw InvalidInput("train: sample with empty triple set");
    if (s.label != 0 && s.label != 1) throw InvalidInput("train: label must be 0 or 1");
  }
}

}  // namespace

std::vector<ParamBlock> parameter_blocks(RnModel& m) {
  std::vector<ParamBlock> out;
  auto add = [&](std::string name, auto& x) {
    out.push_back({std::move(name), x.data(), static_cast<std::size_t>(x.size())});
  };
  add("embedding", m.encoder.embedding);
  const char* gate_names[4] = {"input", "forget", "output", "candidate"};
  for (std::size_t k = 0; k < 4; ++k) {
    std::string g = std::string("lstm.") + gate_names[k];
    add(g + ".W", m.encoder.gates[k].input_weights);
    add(g + ".R", m.encoder.gates[k].recurrent_weights);
    add(g + ".b", m.encoder.gates[k].bias);
  }
  for (std::size_t l = 0; l < m.rn.g_theta.layers.size(); ++l) {
    add("g_theta." + std::to_string(l) + ".W", m.rn.g_theta.layers[l].weights);
    add("g_theta." + std::to_string(l) + ".b", m.rn.g_theta.layers[l].bias);
  }
  for (std::size_t l = 0; l < m.rn.f_phi.layers.size(); ++l) {
    add("f_phi." + std::to_string(l) + ".W", m.rn.f_phi.layers[l].weights);
    add("f_phi." + std::to_string(l) + ".b", m.rn.f_phi.layers[l].bias);
  }
  return out;
}

Vocabulary vocabulary_for(std::span<const TrainSample> data, Vocabulary base) {
  for (const auto& s : data)
    for (const auto& t : s.triples) {
      base.add(t.identification);
      base.add(t.status);
      base.add(t.behavior);
    }
  return base;
}

double sample_loss(const RnModel& m, const TrainSample& s) {
  std::vector<EncodedTriple> enc;
  enc.reserve(s.triples.size());
  for (const auto& t : s.triples) enc.push_back(encode_triple(m, t.tokens()));
  return bce_from_logit(rn_logit(enc, m.rn), s.label);
}

Gradients compute_gradients(const RnModel& m, std::span<const TrainSample> batch) {
  check_data(batch);
  std::vector<IndexedSample> indexed;
  indexed.reserve(batch.size());
  for (const auto& s : batch) indexed.push_back(index_sample(m.vocab, s));
  std::vector<const IndexedSample*> ptrs;
  for (const auto& s : indexed) ptrs.push_back(&s);
  Gradients out{0.0, zero_like(m)};
  out.loss = batch_gradients(m, ptrs, out.grad);
  return out;
}

TrainResult train(std::span<const TrainSample> data, const TrainConfig& cfg) {
  check_data(data);
  if (cfg.epochs < 1) throw InvalidInput("train: epochs must be >= 1");
  if (cfg.batch_size < 1) throw InvalidInput("train: batch size must be >= 1");
  if (!(cfg.learning_rate > 0.0)) throw InvalidInput("train: learning rate must be positive");
  if (cfg.momentum < 0.0 || cfg.momentum >= 1.0) throw InvalidInput("train: momentum must lie in [0, 1)");

  TrainResult result;
  const bool has_pos = std::any_of(data.begin(), data.end(), [](const TrainSample& s) { return s.label == 1; });
  const bool has_neg = std::any_of(data.begin(), data.end(), [](const TrainSample& s) { return s.label == 0; });
  result.degenerate_dataset = !(has_pos && has_neg);

  result.model = init_model(vocabulary_for(data), cfg.layout, cfg.input_dim, cfg.seed);
  RnModel& model = result.model;
  std::vector<IndexedSample> indexed;
  indexed.reserve(data.size());
  for (const auto& s : data) indexed.push_back(index_sample(model.vocab, s));

  RnModel velocity = zero_like(model);
  auto params = parameter_blocks(model);
  auto vel = parameter_blocks(velocity);

  std::vector<std::size_t> order(indexed.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 shuffle_rng(cfg.seed ^ 0x5deece66dULL);
  const auto batch_size = static_cast<std::size_t>(cfg.batch_size);
  result.loss_curve.reserve(static_cast<std::size_t>(cfg.epochs));
  RnModel grad = zero_like(model);
  auto grads = parameter_blocks(grad);

  for (int epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double epoch_loss = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      const std::size_t end = std::min(order.size(), start + batch_size);
      std::vector<const IndexedSample*> batch;
      for (std::size_t k = start; k < end; ++k) batch.push_back(&indexed[order[k]]);
      for (auto& b : grads) std::fill(b.data, b.data + b.size, 0.0);
      const double loss = batch_gradients(model, batch, grad);
      epoch_loss += loss * static_cast<double>(end - start);
      for (std::size_t k = 0; k < params.size(); ++k) {
        double* p = params[k].data;
        double* v = vel[k].data;
        const double* g = grads[k].data;
        for (std::size_t e = 0; e < params[k].size; ++e) {
          v[e] = cfg.momentum * v[e] - cfg.learning_rate * g[e];
          p[e] += v[e];
        }
      }
    }
    result.loss_curve.push_back(epoch_loss / static_cast<double>(order.size()));
  }
  return result;
}

TrainResult train(std::span<const TrainSample> data, int epochs, double lr, std::uint64_t seed) {
  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.learning_rate = lr;
  cfg.seed = seed;
  return train(data, cfg);
}

double predict(const RnModel& m, const TrainSample& s) {
  std::vector<kb::TokenTriple> tokens;
  tokens.reserve(s.triples.size());
  for (const auto& t : s.triples) tokens.push_back(t.tokens());
  return score_triples(m, tokens);
}

double accuracy(const RnModel& m, std::span<const TrainSample> data, double threshold) {
  if (data.empty()) return 0.0;
  std::size_t correct = 0;
  for (const auto& s : data) {
    const int guess = predict(m, s) >= threshold ? 1 : 0;
    if (guess == s.label) ++correct;
  }
  return static_cast<double>(correct) / static_cast<double>(data.size());
}

}  // namespace blcs::rn
