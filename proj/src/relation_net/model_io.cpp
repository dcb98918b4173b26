#include "blcs/relation_net/model_io.hpp"

#include <fstream>

#include "blcs/common/error.hpp"

namespace blcs::rn {

namespace {

using nlohmann::json;

json matrix_to_json(const Eigen::MatrixXd& m) {
  json data = json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
  return {{"shape", {m.rows(), m.cols()}}, {"data", std::move(data)}};
}

Eigen::MatrixXd matrix_from_json(const json& j, const std::string& what) {
  try {
    const auto shape = j.at("shape").get<std::vector<long>>();
    const auto data = j.at("data").get<std::vector<double>>();
    if (shape.size() != 2 || shape[0] < 0 || shape[1] < 0 ||
        static_cast<std::size_t>(shape[0] * shape[1]) != data.size())
      throw InvalidInput(what + ": shape does not match data length");
    Eigen::MatrixXd m(shape[0], shape[1]);
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = data[k++];
    return m;
  } catch (const json::exception& e) {
    throw InvalidInput(what + ": " + e.what());
  }
}

Eigen::VectorXd vector_from_json(const json& j, const std::string& what) {
  Eigen::MatrixXd m = matrix_from_json(j, what);
  if (m.cols() != 1) throw InvalidInput(what + ": expected a column vector");
  return m.col(0);
}

json mlp_to_json(const Mlp& mlp) {
  json layers = json::array();
  for (const auto& l : mlp.layers)
    layers.push_back({{"weights", matrix_to_json(l.weights)},
                      {"bias", matrix_to_json(l.bias)},
                      {"activation", std::string(to_string(l.activation))}});
  return layers;
}

Mlp mlp_from_json(const json& j, const std::string& what) {
  Mlp mlp;
  if (!j.is_array()) throw InvalidInput(what + ": expected a layer array");
  for (std::size_t l = 0; l < j.size(); ++l) {
    const std::string name = what + "[" + std::to_string(l) + "]";
    DenseLayer layer;
    layer.weights = matrix_from_json(j[l].at("weights"), name + ".weights");
    layer.bias = vector_from_json(j[l].at("bias"), name + ".bias");
    layer.activation = activation_from_string(j[l].at("activation").get<std::string>());
    mlp.layers.push_back(std::move(layer));
  }
  return mlp;
}

const char* kGateNames[4] = {"input", "forget", "output", "candidate"};

}  // namespace

json model_to_json(const RnModel& m) {
  json gates = json::object();
  for (std::size_t k = 0; k < 4; ++k)
    gates[kGateNames[k]] = {{"input_weights", matrix_to_json(m.encoder.gates[k].input_weights)},
                            {"recurrent_weights", matrix_to_json(m.encoder.gates[k].recurrent_weights)},
                            {"bias", matrix_to_json(m.encoder.gates[k].bias)}};
  return {{"format", kModelFormat},
          {"version", kModelVersion},
          {"hidden_size", kLstmHidden},
          {"vocabulary", m.vocab.tokens()},
          {"embedding", matrix_to_json(m.encoder.embedding)},
          {"lstm", std::move(gates)},
          {"g_theta", mlp_to_json(m.rn.g_theta)},
          {"f_phi", mlp_to_json(m.rn.f_phi)}};
}

RnModel model_from_json(const json& j) {
  try {
    if (j.at("format").get<std::string>() != kModelFormat) throw InvalidInput("model: unexpected format tag");
    if (j.at("version").get<int>() != kModelVersion) throw InvalidInput("model: unsupported version");
    if (j.at("hidden_size").get<int>() != kLstmHidden) throw InvalidInput("model: hidden size must be 32");
    RnModel m;
    const auto tokens = j.at("vocabulary").get<std::vector<std::string>>();
    for (std::size_t k = 0; k < tokens.size(); ++k) {
      if (m.vocab.add(tokens[k]) != static_cast<int>(k)) throw InvalidInput("model: vocabulary order mismatch");
    }
    m.encoder.embedding = matrix_from_json(j.at("embedding"), "embedding");
    for (std::size_t k = 0; k < 4; ++k) {
      const auto& g = j.at("lstm").at(kGateNames[k]);
      const std::string n = std::string("lstm.") + kGateNames[k];
      m.encoder.gates[k].input_weights = matrix_from_json(g.at("input_weights"), n + ".input_weights");
      m.encoder.gates[k].recurrent_weights = matrix_from_json(g.at("recurrent_weights"), n + ".recurrent_weights");
      m.encoder.gates[k].bias = vector_from_json(g.at("bias"), n + ".bias");
    }
    m.rn.g_theta = mlp_from_json(j.at("g_theta"), "g_theta");
    m.rn.f_phi = mlp_from_json(j.at("f_phi"), "f_phi");
    m.validate();
    return m;
  } catch (const json::exception& e) {
    throw InvalidInput(std::string("model: ") + e.what());
  }
}

void save_model(const RnModel& m, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw InvalidInput("cannot write model file " + path.string());
  out << model_to_json(m).dump() << '\n';
}

RnModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot read model file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidInput("model file " + path.string() + ": " + e.what());
  }
  return model_from_json(j);
}

}  // namespace blcs::rn
