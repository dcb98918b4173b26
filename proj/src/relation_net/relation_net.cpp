#include "blcs/relation_net/relation_net.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "blcs/common/error.hpp"

namespace blcs::rn {

void RnParams::validate() const {
  g_theta.validate("g_theta");
  f_phi.validate("f_phi");
  if (g_theta.input_width() != 3 * kLstmHidden) throw InvalidInput("g_theta input width must be 96");
  if (f_phi.input_width() != g_theta.output_width()) throw InvalidInput("f_phi input width must match g_theta output");
  if (f_phi.output_width() != 1) throw InvalidInput("f_phi must produce a single output");
  if (f_phi.layers.back().activation != Activation::sigmoid)
    throw InvalidInput("f_phi output activation must be sigmoid");
}

RnParams RnParams::zeros(const RnLayout& layout) {
  RnParams p;
  p.g_theta = Mlp::zeros(layout.g_widths, layout.hidden, layout.g_output);
  p.f_phi = Mlp::zeros(layout.f_widths, layout.hidden, Activation::sigmoid);
  return p;
}

Eigen::VectorXd relation_input(const EncodedTriple& t) {
  Eigen::VectorXd x(t.identification.size() + t.behavior.size() + t.status.size());
  x << t.identification, t.behavior, t.status;
  return x;
}

Eigen::VectorXd relation_vector(const EncodedTriple& t, const RnParams& p) {
  return p.g_theta.forward(relation_input(t));
}

namespace {

Eigen::VectorXd canonical_sum(std::span<const EncodedTriple> triples, const RnParams& p) {
  if (triples.empty()) throw InvalidInput("rn_score: empty triple list");
  std::vector<Eigen::VectorXd> rel;
  rel.reserve(triples.size());
  for (const auto& t : triples) rel.push_back(relation_vector(t, p));
  std::sort(rel.begin(), rel.end(), [](const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
  });
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(rel.front().size());
  for (const auto& r : rel) sum += r;
  return sum;
}

}  // namespace

double score_relation_sum(const Eigen::VectorXd& sum, const RnParams& p) {
  double s = p.f_phi.forward(sum)(0);
  return std::clamp(s, 0.0, 1.0);
}

double rn_score(std::span<const EncodedTriple> triples, const RnParams& p) {
  return score_relation_sum(canonical_sum(triples, p), p);
}

double rn_logit(std::span<const EncodedTriple> triples, const RnParams& p) {
  return p.f_phi.forward(canonical_sum(triples, p), false)(0);
}

void RnModel::validate() const {
  encoder.validate();
  rn.validate();
  if (vocab.size() != encoder.vocab_size()) throw InvalidInput("vocabulary size does not match embedding rows");
}

std::array<int, 2> entity_sequence(const Vocabulary& vocab, kb::Base base, std::string_view token) {
  return {vocab.index_of(Vocabulary::tag(base)), vocab.index_of(token)};
}

Eigen::VectorXd encode_entity(const RnModel& m, kb::Base base, std::string_view token) {
  auto seq = entity_sequence(m.vocab, base, token);
  return lstm_encode(seq, m.encoder);
}

EncodedTriple encode_triple(const RnModel& m, const kb::TokenTriple& t) {
  return {encode_entity(m, kb::Base::identification, t.identification),
          encode_entity(m, kb::Base::behavior, t.behavior), encode_entity(m, kb::Base::status, t.status)};
}

double score_triples(const RnModel& m, std::span<const kb::TokenTriple> triples) {
  std::vector<EncodedTriple> enc;
  enc.reserve(triples.size());
  for (const auto& t : triples) enc.push_back(encode_triple(m, t));
  return rn_score(enc, m.rn);
}

namespace {

void fill_uniform(Eigen::MatrixXd& m, double a, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> d(-a, a);
  for (Eigen::Index c = 0; c < m.cols(); ++c)
    for (Eigen::Index r = 0; r < m.rows(); ++r) m(r, c) = d(rng);
}

void init_mlp(Mlp& mlp, std::mt19937_64& rng) {
  for (auto& layer : mlp.layers) {
    double fan_in = static_cast<double>(layer.weights.cols());
    double fan_out = static_cast<double>(layer.weights.rows());
    double a = layer.activation == Activation::relu ? std::sqrt(6.0 / fan_in) : std::sqrt(6.0 / (fan_in + fan_out));
    fill_uniform(layer.weights, a, rng);
    layer.bias.setZero();
  }
}

}  // namespace

RnModel init_model(Vocabulary vocab, const RnLayout& layout, int input_dim, std::uint64_t seed) {
  RnModel m;
  m.vocab = std::move(vocab);
  m.encoder = EncoderParams::zeros(m.vocab.size(), input_dim);
  m.rn = RnParams::zeros(layout);
  m.rn.validate();
  std::mt19937_64 rng(seed);
  fill_uniform(m.encoder.embedding, 0.1, rng);
  const double a = 1.0 / std::sqrt(static_cast<double>(kLstmHidden));
  for (auto& gate : m.encoder.gates) {
    fill_uniform(gate.input_weights, a, rng);
    fill_uniform(gate.recurrent_weights, a, rng);
  }
  m.encoder.gates[kForgetGate].bias.setConstant(1.0);
  init_mlp(m.rn.g_theta, rng);
  init_mlp(m.rn.f_phi, rng);
  return m;
}

TripleEvaluator::TripleEvaluator(std::shared_ptr<const RnModel> model) : model_(std::move(model)) {
  if (!model_) throw InvalidInput("TripleEvaluator: null model");
}

int TripleEvaluator::relation_dim() const noexcept { return model_->rn.g_theta.output_width(); }

const Eigen::VectorXd& TripleEvaluator::encoding(kb::Base base, const std::string& token) {
  auto key = std::make_pair(base, token);
  auto it = encodings_.find(key);
  if (it == encodings_.end()) it = encodings_.emplace(std::move(key), encode_entity(*model_, base, token)).first;
  return it->second;
}

const TripleEvaluator::Entry& TripleEvaluator::entry(const kb::TokenTriple& t) {
  auto it = entries_.find(t);
  if (it != entries_.end()) return it->second;
  EncodedTriple e{encoding(kb::Base::identification, t.identification), encoding(kb::Base::behavior, t.behavior),
                  encoding(kb::Base::status, t.status)};
  Entry entry;
  entry.relation = relation_vector(e, model_->rn);
  entry.score = score_relation_sum(entry.relation, model_->rn);
  return entries_.emplace(t, std::move(entry)).first->second;
}

const Eigen::VectorXd& TripleEvaluator::relation(const kb::TokenTriple& t) { return entry(t).relation; }

double TripleEvaluator::score(const kb::TokenTriple& t) { return entry(t).score; }

double TripleEvaluator::score(std::span<const kb::TokenTriple> triples) {
  if (triples.empty()) throw InvalidInput("rn_score: empty triple list");
  std::vector<const Eigen::VectorXd*> rel;
  for (const auto& t : triples) rel.push_back(&entry(t).relation);
  std::sort(rel.begin(), rel.end(), [](const Eigen::VectorXd* a, const Eigen::VectorXd* b) {
    return std::lexicographical_compare(a->data(), a->data() + a->size(), b->data(), b->data() + b->size());
  });
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(rel.front()->size());
  for (const auto* r : rel) sum += *r;
  return score_relation_sum(sum, model_->rn);
}

}  // namespace blcs::rn
