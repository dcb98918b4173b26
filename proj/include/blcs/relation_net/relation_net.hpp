#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "blcs/knowledge_base/knowledge_triple.hpp"
#include "blcs/relation_net/lstm.hpp"
#include "blcs/relation_net/mlp.hpp"
#include "blcs/relation_net/vocabulary.hpp"

namespace blcs::rn {

struct RnLayout {
  std::vector<int> g_widths{3 * kLstmHidden, 64, 64};
  std::vector<int> f_widths{64, 32, 1};
  Activation hidden = Activation::relu;
  Activation g_output = Activation::relu;
};

struct RnParams {
  Mlp g_theta;
  Mlp f_phi;

  /// g_theta must accept 3 * encoder hidden, f_phi must end in one sigmoid unit.
  void validate() const;

  static RnParams zeros(const RnLayout& layout);
};

/// LSTM encodings of the three entities of one triple.
struct EncodedTriple {
  Eigen::VectorXd identification;
  Eigen::VectorXd behavior;
  Eigen::VectorXd status;
};

/// Input of g_theta: concat(i, b, s).
Eigen::VectorXd relation_input(const EncodedTriple& t);
Eigen::VectorXd relation_vector(const EncodedTriple& t, const RnParams& p);

/// f_phi applied to the sum of g_theta over all triples. Relation vectors are
/// summed in sorted order so any permutation of `triples` gives the same bits.
double rn_score(std::span<const EncodedTriple> triples, const RnParams& p);
/// Same aggregation, but returns the pre-sigmoid output of f_phi.
double rn_logit(std::span<const EncodedTriple> triples, const RnParams& p);
/// Score of an already aggregated relation sum.
double score_relation_sum(const Eigen::VectorXd& sum, const RnParams& p);

struct RnModel {
  Vocabulary vocab;
  EncoderParams encoder;
  RnParams rn;

  void validate() const;
};

/// Each entity is encoded from the two-token sequence [base tag, token].
std::array<int, 2> entity_sequence(const Vocabulary& vocab, kb::Base base, std::string_view token);
Eigen::VectorXd encode_entity(const RnModel& m, kb::Base base, std::string_view token);
EncodedTriple encode_triple(const RnModel& m, const kb::TokenTriple& t);
double score_triples(const RnModel& m, std::span<const kb::TokenTriple> triples);

/// Seeded random initialisation.
RnModel init_model(Vocabulary vocab, const RnLayout& layout, int input_dim, std::uint64_t seed);

/// Memoises entity encodings and per-triple relation vectors for one model.
/// Not thread-safe; give each owner its own instance.
class TripleEvaluator {
 public:
  explicit TripleEvaluator(std::shared_ptr<const RnModel> model);

  const RnModel& model() const noexcept { return *model_; }
  std::shared_ptr<const RnModel> shared_model() const noexcept { return model_; }
  int relation_dim() const noexcept;

  const Eigen::VectorXd& encoding(kb::Base base, const std::string& token);
  const Eigen::VectorXd& relation(const kb::TokenTriple& t);
  /// Score of the singleton list {t}.
  double score(const kb::TokenTriple& t);
  double score(std::span<const kb::TokenTriple> triples);

 private:
  struct Entry {
    Eigen::VectorXd relation;
    double score = 0.0;
  };
  const Entry& entry(const kb::TokenTriple& t);

  std::shared_ptr<const RnModel> model_;
  std::map<std::pair<kb::Base, std::string>, Eigen::VectorXd> encodings_;
  std::map<kb::TokenTriple, Entry> entries_;
};

}  // namespace blcs::rn
