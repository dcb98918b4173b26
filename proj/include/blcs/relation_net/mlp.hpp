#pragma once

#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace blcs::rn {

enum class Activation { identity, relu, sigmoid, tanh };

std::string_view to_string(Activation a) noexcept;
Activation activation_from_string(std::string_view name);

Eigen::MatrixXd activate(Activation a, const Eigen::MatrixXd& z);
/// Derivative of the activation evaluated from pre-activation `z` and output `y`.
Eigen::MatrixXd activation_derivative(Activation a, const Eigen::MatrixXd& z, const Eigen::MatrixXd& y);

struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;     // out
  Activation activation = Activation::relu;
};

struct Mlp {
  std::vector<DenseLayer> layers;

  int input_width() const;
  int output_width() const;

  /// With `final_activation == false` the last layer returns its pre-activation.
  Eigen::VectorXd forward(const Eigen::VectorXd& x, bool final_activation = true) const;

  /// Throws InvalidInput when consecutive layer shapes disagree.
  void validate(std::string_view name) const;

  /// Zero-initialised layers for widths {in, h1, ..., out}.
  static Mlp zeros(std::span<const int> widths, Activation hidden, Activation output);
};

}  // namespace blcs::rn
