#include "blcs/assoc_memory/relation_memory.hpp"

#include <algorithm>
#include <cstdio>

#include "blcs/common/error.hpp"

namespace blcs::mem {

double cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  const double na = a.norm();
  const double nb = b.norm();
  if (na == 0.0 || nb == 0.0) return 0.0;
  return std::clamp(a.dot(b) / (na * nb), -1.0, 1.0);
}

RelationMemory::RelationMemory(int dimension, int k, double match_threshold)
    : dimension_(dimension), k_(k), match_threshold_(match_threshold) {
  if (dimension < 1) throw InvalidInput("memory dimension must be positive");
  if (k < 1) throw InvalidInput("k must be >= 1");
  if (match_threshold < -1.0 || match_threshold > 1.0) throw InvalidInput("match threshold must lie in [-1, 1]");
}

void RelationMemory::check_dimension(const Eigen::VectorXd& v) const {
  if (v.size() != dimension_)
    throw InvalidInput("vector width " + std::to_string(v.size()) + " does not match memory dimension " +
                       std::to_string(dimension_));
}

std::string RelationMemory::fresh_group_name() {
  for (;;) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "group-%04zu", ++auto_counter_);
    if (!groups_.count(buf)) return buf;
  }
}

std::string RelationMemory::store(const Eigen::VectorXd& v, std::optional<std::string> label) {
  check_dimension(v);
  std::string group;
  if (label) {
    group = *label;
  } else {
    if (!nodes_.empty()) {
      const auto best = ranked(v).front();
      if (best.similarity >= match_threshold_) group = nodes_[best.node].group;
    }
    if (group.empty()) group = fresh_group_name();
  }
  const std::size_t id = nodes_.size();
  nodes_.push_back({id, group, v});
  groups_[group].push_back(id);
  return group;
}

std::vector<Neighbor> RelationMemory::ranked(const Eigen::VectorXd& q) const {
  check_dimension(q);
  std::vector<Neighbor> out;
  out.reserve(nodes_.size());
  for (const auto& n : nodes_) out.push_back({n.id, cosine(q, n.vector)});
  std::sort(out.begin(), out.end(), [](const Neighbor& a, const Neighbor& b) {
    return a.similarity != b.similarity ? a.similarity > b.similarity : a.node < b.node;
  });
  return out;
}

std::string RelationMemory::knn_assign(const Eigen::VectorXd& q, int k) const {
  if (nodes_.empty()) throw NoRelations("knn_assign on empty memory");
  if (k < 1) throw InvalidInput("k must be >= 1");
  const auto order = ranked(q);
  const std::size_t take = std::min(order.size(), static_cast<std::size_t>(k));
  std::map<std::string, std::pair<int, std::size_t>> votes;  // group -> (count, best rank)
  for (std::size_t r = 0; r < take; ++r) {
    auto [it, fresh] = votes.try_emplace(nodes_[order[r].node].group, 0, r);
    ++it->second.first;
  }
  const std::string* best = nullptr;
  std::pair<int, std::size_t> best_vote{0, 0};
  for (const auto& [group, vote] : votes) {
    if (!best || vote.first > best_vote.first || (vote.first == best_vote.first && vote.second < best_vote.second)) {
      best = &group;
      best_vote = vote;
    }
  }
  return *best;
}

RecallResult RelationMemory::recall(const Eigen::VectorXd& query, int max_iters) const {
  if (nodes_.empty()) throw NoRelations("recall on empty memory");
  if (max_iters < 1) throw InvalidInput("max_iters must be >= 1");
  check_dimension(query);
  RecallResult r;
  Eigen::VectorXd sum = query;
  double count = 1.0;
  Eigen::VectorXd q = query;
  std::optional<std::size_t> previous;
  std::size_t best = 0;
  for (int it = 1; it <= max_iters; ++it) {
    best = ranked(q).front().node;
    r.iterations = it;
    r.confidence = cosine(q, nodes_[best].vector);
    if (previous && *previous == best) break;
    r.visited.push_back(best);
    r.retrieved.push_back(nodes_[best].vector);
    sum += nodes_[best].vector;
    count += 1.0;
    q = sum / count;
    previous = best;
  }
  r.context = q;
  r.matched = r.confidence >= match_threshold_;
  r.group = r.matched ? nodes_[best].group : knn_assign(r.context);
  return r;
}

nlohmann::json RelationMemory::to_json() const {
  nlohmann::json nodes = nlohmann::json::array();
  for (const auto& n : nodes_)
    nodes.push_back({{"group", n.group}, {"vector", std::vector<double>(n.vector.data(), n.vector.data() + n.vector.size())}});
  return {{"dimension", dimension_}, {"k", k_}, {"match_threshold", match_threshold_}, {"nodes", nodes}};
}

RelationMemory RelationMemory::from_json(const nlohmann::json& j) {
  try {
    RelationMemory m(j.at("dimension").get<int>(), j.at("k").get<int>(), j.at("match_threshold").get<double>());
    for (const auto& n : j.at("nodes")) {
      const auto v = n.at("vector").get<std::vector<double>>();
      m.store(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size())),
              n.at("group").get<std::string>());
    }
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw InvalidInput(std::string("memory json: ") + e.what());
  }
}

}  // namespace blcs::mem
