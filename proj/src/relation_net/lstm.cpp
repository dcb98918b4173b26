#include "blcs/relation_net/lstm.hpp"

#include <cmath>
#include <string>

#include "blcs/common/error.hpp"

namespace blcs::rn {

namespace {

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

}  // namespace

void EncoderParams::validate() const {
  if (embedding.rows() < 1 || embedding.cols() < 1) throw InvalidInput("encoder: empty embedding table");
  const char* names[4] = {"input", "forget", "output", "candidate"};
  for (int g = 0; g < 4; ++g) {
    const auto& gate = gates[static_cast<std::size_t>(g)];
    std::string n = std::string("encoder ") + names[g] + " gate: ";
    if (gate.input_weights.rows() != embedding.cols() || gate.input_weights.cols() != kLstmHidden)
      throw InvalidInput(n + "input weights must be (input_dim, 32)");
    if (gate.recurrent_weights.rows() != kLstmHidden || gate.recurrent_weights.cols() != kLstmHidden)
      throw InvalidInput(n + "recurrent weights must be (32, 32)");
    if (gate.bias.size() != kLstmHidden) throw InvalidInput(n + "bias must have 32 entries");
  }
}

EncoderParams EncoderParams::zeros(int vocab_size, int input_dim) {
  if (vocab_size < 1 || input_dim < 1) throw InvalidInput("encoder dimensions must be positive");
  EncoderParams p;
  p.embedding = Eigen::MatrixXd::Zero(vocab_size, input_dim);
  for (auto& g : p.gates) {
    g.input_weights = Eigen::MatrixXd::Zero(input_dim, kLstmHidden);
    g.recurrent_weights = Eigen::MatrixXd::Zero(kLstmHidden, kLstmHidden);
    g.bias = Eigen::VectorXd::Zero(kLstmHidden);
  }
  return p;
}

Eigen::VectorXd lstm_encode(std::span<const int> tokens, const EncoderParams& p) {
  if (tokens.empty()) throw InvalidInput("lstm_encode: empty sequence");
  Eigen::VectorXd h = Eigen::VectorXd::Zero(kLstmHidden);
  Eigen::VectorXd c = Eigen::VectorXd::Zero(kLstmHidden);
  for (int tok : tokens) {
    if (tok < 0 || tok >= p.vocab_size()) tok = 0;
    Eigen::VectorXd x = p.embedding.row(tok).transpose();
    std::array<Eigen::VectorXd, 4> z;
    for (int g = 0; g < 4; ++g) {
      const auto& gate = p.gates[static_cast<std::size_t>(g)];
      z[static_cast<std::size_t>(g)] =
          gate.input_weights.transpose() * x + gate.recurrent_weights.transpose() * h + gate.bias;
    }
    for (int k = 0; k < kLstmHidden; ++k) {
      double i = sigmoid(z[kInputGate](k));
      double f = sigmoid(z[kForgetGate](k));
      double o = sigmoid(z[kOutputGate](k));
      double g = std::tanh(z[kCandidateGate](k));
      c(k) = f * c(k) + i * g;
      h(k) = o * std::tanh(c(k));
    }
  }
  return h;
}

}  // namespace blcs::rn
