#pragma once

#include <cstddef>
#include <vector>

#include "blcs/relation_net/training.hpp"
#include "blcs/sim/scenario.hpp"

namespace blcs::sim {

struct LabeledSplit {
  std::vector<rn::TrainSample> train;
  std::vector<rn::TrainSample> test;
};

/// Interactions of affair-only runs, each round with its own malicious
/// assignment, labeled 1 for a valid act of the object and 0 otherwise.
/// Training keeps the distinct triples of `training.rounds` rounds; the test
/// set is every interaction of `heldout_rounds` further rounds.
LabeledSplit bootstrap_samples(const Scenario& sc);

struct TrainingReport {
  rn::TrainResult result;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  double heldout_accuracy = 0.0;
  double honest_acceptance = 0.0;  // share of honest claims trusted at tau
  std::size_t honest_claims = 0;
};

/// Fraction of honest peers' claims a fresh verifier accepts after it has
/// seen the affairs of a short warm-up period.
double honest_acceptance_rate(const Scenario& sc, std::shared_ptr<const rn::RnModel> model, std::size_t* claims = nullptr);

TrainingReport train_for(const Scenario& sc);

}  // namespace blcs::sim
