#pragma once

#include <array>
#include <span>

#include <Eigen/Dense>

namespace blcs::rn {

inline constexpr int kLstmHidden = 32;

enum GateIndex : int { kInputGate = 0, kForgetGate = 1, kOutputGate = 2, kCandidateGate = 3 };

/// Weights are stored as (input_dim x 32) and (32 x 32); the pre-activation of
/// a gate is W^T x + R^T h + b.
struct LstmGate {
  Eigen::MatrixXd input_weights;
  Eigen::MatrixXd recurrent_weights;
  Eigen::VectorXd bias;
};

struct EncoderParams {
  Eigen::MatrixXd embedding;  // vocab_size x input_dim, one row per token
  std::array<LstmGate, 4> gates;

  int vocab_size() const noexcept { return static_cast<int>(embedding.rows()); }
  int input_dim() const noexcept { return static_cast<int>(embedding.cols()); }

  void validate() const;

  static EncoderParams zeros(int vocab_size, int input_dim);
};

/// Runs the LSTM over the token sequence and returns the final hidden state.
/// Out-of-range token ids read the unknown-token row (index 0).
Eigen::VectorXd lstm_encode(std::span<const int> tokens, const EncoderParams& params);

}  // namespace blcs::rn
