#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace blcs::mem {

/// Cosine similarity; 0 when either vector is zero.
double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b);

struct MemoryNode {
  std::size_t id = 0;
  std::string group;
  Eigen::VectorXd vector;
};

struct RecallResult {
  std::string group;
  std::vector<std::size_t> visited;  // node ids in retrieval order
  std::vector<Eigen::VectorXd> retrieved;
  int iterations = 0;
  double confidence = 0.0;  // cosine between the last query and its best node
  bool matched = false;     // confidence reached the match threshold
  Eigen::VectorXd context;  // mean of the original query and every retrieved node
};

struct Neighbor {
  std::size_t node = 0;
  double similarity = 0.0;
};

/// Labelled groups of relation vectors with k-NN assignment and iterative recall.
class RelationMemory {
 public:
  explicit RelationMemory(int dimension, int k = 3, double match_threshold = 0.8);

  /// Appends `v` to `label`, or, unlabelled, to the group of its most similar
  /// node when that similarity reaches the match threshold; otherwise `v`
  /// starts a new group. Returns the group name.
  std::string store(const Eigen::VectorXd& v, std::optional<std::string> label = std::nullopt);

  /// All nodes ranked by similarity (descending, ties by id).
  std::vector<Neighbor> ranked(const Eigen::VectorXd& q) const;

  /// Majority group of the k most similar nodes; ties go to the tied group
  /// holding the best-ranked node. Throws NoRelations when empty.
  std::string knn_assign(const Eigen::VectorXd& q, int k) const;
  std::string knn_assign(const Eigen::VectorXd& q) const { return knn_assign(q, k_); }

  /// Throws NoRelations when empty, InvalidInput when max_iters < 1.
  RecallResult recall(const Eigen::VectorXd& query, int max_iters = 5) const;

  int dimension() const noexcept { return dimension_; }
  int k() const noexcept { return k_; }
  double match_threshold() const noexcept { return match_threshold_; }
  bool empty() const noexcept { return nodes_.empty(); }
  std::size_t size() const noexcept { return nodes_.size(); }
  std::size_t group_count() const noexcept { return groups_.size(); }
  const std::vector<MemoryNode>& nodes() const noexcept { return nodes_; }
  const std::map<std::string, std::vector<std::size_t>>& groups() const noexcept { return groups_; }

  nlohmann::json to_json() const;
  static RelationMemory from_json(const nlohmann::json& j);

 private:
  void check_dimension(const Eigen::VectorXd& v) const;
  std::string fresh_group_name();

  int dimension_;
  int k_;
  double match_threshold_;
  std::vector<MemoryNode> nodes_;
  std::map<std::string, std::vector<std::size_t>> groups_;
  std::size_t auto_counter_ = 0;
};

}  // namespace blcs::mem
