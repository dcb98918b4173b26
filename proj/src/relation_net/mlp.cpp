#include "blcs/relation_net/mlp.hpp"

#include <string>

#include "blcs/common/error.hpp"

namespace blcs::rn {

std::string_view to_string(Activation a) noexcept {
  switch (a) {
    case Activation::identity: return "identity";
    case Activation::relu: return "relu";
    case Activation::sigmoid: return "sigmoid";
    case Activation::tanh: return "tanh";
  }
  return "identity";
}

Activation activation_from_string(std::string_view name) {
  if (name == "identity") return Activation::identity;
  if (name == "relu") return Activation::relu;
  if (name == "sigmoid") return Activation::sigmoid;
  if (name == "tanh") return Activation::tanh;
  throw InvalidInput("unknown activation '" + std::string(name) + "'");
}

Eigen::MatrixXd activate(Activation a, const Eigen::MatrixXd& z) {
  switch (a) {
    case Activation::identity: return z;
    case Activation::relu: return z.cwiseMax(0.0);
    case Activation::sigmoid: return (1.0 / (1.0 + (-z.array()).exp())).matrix();
    case Activation::tanh: return z.array().tanh().matrix();
  }
  return z;
}

Eigen::MatrixXd activation_derivative(Activation a, const Eigen::MatrixXd& z, const Eigen::MatrixXd& y) {
  switch (a) {
    case Activation::identity: return Eigen::MatrixXd::Ones(z.rows(), z.cols());
    case Activation::relu: return (z.array() > 0.0).cast<double>().matrix();
    case Activation::sigmoid: return (y.array() * (1.0 - y.array())).matrix();
    case Activation::tanh: return (1.0 - y.array().square()).matrix();
  }
  return Eigen::MatrixXd::Ones(z.rows(), z.cols());
}

int Mlp::input_width() const { return layers.empty() ? 0 : static_cast<int>(layers.front().weights.cols()); }

int Mlp::output_width() const { return layers.empty() ? 0 : static_cast<int>(layers.back().weights.rows()); }

Eigen::VectorXd Mlp::forward(const Eigen::VectorXd& x, bool final_activation) const {
  Eigen::VectorXd a = x;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    Eigen::VectorXd z = layer.weights * a + layer.bias;
    bool last = l + 1 == layers.size();
    a = (last && !final_activation) ? z : Eigen::VectorXd(activate(layer.activation, z));
  }
  return a;
}

void Mlp::validate(std::string_view name) const {
  const std::string n(name);
  if (layers.empty()) throw InvalidInput(n + ": no layers");
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.weights.rows() < 1 || layer.weights.cols() < 1)
      throw InvalidInput(n + ": empty weight matrix in layer " + std::to_string(l));
    if (layer.bias.size() != layer.weights.rows())
      throw InvalidInput(n + ": bias size mismatch in layer " + std::to_string(l));
    if (l > 0 && layer.weights.cols() != layers[l - 1].weights.rows())
      throw InvalidInput(n + ": layer " + std::to_string(l) + " input width mismatch");
  }
}

Mlp Mlp::zeros(std::span<const int> widths, Activation hidden, Activation output) {
  if (widths.size() < 2) throw InvalidInput("mlp needs at least input and output width");
  Mlp m;
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    if (widths[l] < 1 || widths[l + 1] < 1) throw InvalidInput("mlp widths must be positive");
    DenseLayer layer;
    layer.weights = Eigen::MatrixXd::Zero(widths[l + 1], widths[l]);
    layer.bias = Eigen::VectorXd::Zero(widths[l + 1]);
    layer.activation = l + 2 == widths.size() ? output : hidden;
    m.layers.push_back(std::move(layer));
  }
  return m;
}

}  // namespace blcs::rn
