#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "blcs/knowledge_base/knowledge_triple.hpp"
#include "blcs/relation_net/relation_net.hpp"

namespace blcs::rn {

struct TrainSample {
  std::vector<kb::KnowledgeTriple> triples;
  int label = 1;  // 1 trusted, 0 malicious
};

struct TrainConfig {
  int epochs = 2000;
  double learning_rate = 0.05;
  double momentum = 0.9;
  int batch_size = 32;
  int input_dim = 16;
  std::uint64_t seed = 1;
  RnLayout layout;
};

struct TrainResult {
  RnModel model;
  std::vector<double> loss_curve;  // one mean loss per epoch
  bool degenerate_dataset = false;
};

/// Every token seen in `data` is appended to the vocabulary.
Vocabulary vocabulary_for(std::span<const TrainSample> data, Vocabulary base = {});

/// Minibatch SGD with momentum on binary cross-entropy. Throws InvalidInput on
/// empty data, empty triple sets or epochs < 1. Single-class data trains but
/// sets `degenerate_dataset`.
TrainResult train(std::span<const TrainSample> data, const TrainConfig& cfg);
TrainResult train(std::span<const TrainSample> data, int epochs, double lr, std::uint64_t seed);

/// Cross-entropy of one sample, computed through the plain forward path.
double sample_loss(const RnModel& m, const TrainSample& s);

/// Mean loss and its gradient over `batch` by backpropagation. The gradient is
/// returned in a model of identical shape.
struct Gradients {
  double loss = 0.0;
  RnModel grad;
};
Gradients compute_gradients(const RnModel& m, std::span<const TrainSample> batch);

double predict(const RnModel& m, const TrainSample& s);
double accuracy(const RnModel& m, std::span<const TrainSample> data, double threshold = 0.5);

/// Flat views over every trainable array, in a fixed order shared by all
/// models with the same layout.
struct ParamBlock {
  std::string name;
  double* data = nullptr;
  std::size_t size = 0;
};
std::vector<ParamBlock> parameter_blocks(RnModel& m);

}  // namespace blcs::rn
