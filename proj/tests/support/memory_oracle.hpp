#pragma once

#include <cmath>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "blcs/assoc_memory/relation_memory.hpp"

namespace blcs::testing {

inline double plain_cosine(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  double dot = 0, na = 0, nb = 0;
  for (Eigen::Index k = 0; k < a.size(); ++k) {
    dot += a(k) * b(k);
    na += a(k) * a(k);
    nb += b(k) * b(k);
  }
  if (na == 0 || nb == 0) return 0.0;
  return dot / std::sqrt(na * nb);
}

/// Enumerates every node sequence of length <= max_iters and keeps those in
/// which each step picks a most similar node for the running mean query and
/// which stop exactly at a repeat or at max_iters. Returns the final node of
/// the surviving trajectory (ties resolved toward lower ids).
inline std::optional<std::size_t> exhaustive_recall_node(const mem::RelationMemory& m, const Eigen::VectorXd& query,
                                                         int max_iters) {
  const auto& nodes = m.nodes();
  std::optional<std::size_t> answer;
  std::vector<std::size_t> path;
  auto is_best = [&](const Eigen::VectorXd& q, std::size_t pick) {
    const double s = plain_cosine(q, nodes[pick].vector);
    for (std::size_t k = 0; k < nodes.size(); ++k) {
      const double o = plain_cosine(q, nodes[k].vector);
      if (o > s + 1e-12 || (std::abs(o - s) <= 1e-12 && k < pick)) return false;
    }
    return true;
  };
  auto running = [&]() {
    Eigen::VectorXd sum = query;
    for (auto id : path) sum += nodes[id].vector;
    return Eigen::VectorXd(sum / static_cast<double>(path.size() + 1));
  };
  // path holds distinct retrieved nodes; the final step either repeats the last one or hits the cap
  auto dfs = [&](auto&& self) -> void {
    const Eigen::VectorXd q = running();
    const int step = static_cast<int>(path.size()) + 1;
    for (std::size_t pick = 0; pick < nodes.size(); ++pick) {
      if (!is_best(q, pick)) continue;
      if (!path.empty() && pick == path.back()) {
        if (!answer) answer = pick;
        continue;
      }
      if (step == max_iters) {
        if (!answer) answer = pick;
        continue;
      }
      path.push_back(pick);
      self(self);
      path.pop_back();
    }
  };
  dfs(dfs);
  return answer;
}

/// Three well separated groups of `per_group` nodes each around random centres.
inline mem::RelationMemory three_group_fixture(int dim, int per_group, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  mem::RelationMemory m(dim);
  for (int g = 0; g < 3; ++g) {
    Eigen::VectorXd centre = Eigen::VectorXd::Zero(dim);
    for (int k = 0; k < dim / 3; ++k) centre(g * (dim / 3) + k) = 1.0;
    for (int p = 0; p < per_group; ++p) {
      Eigen::VectorXd v = centre;
      for (int k = 0; k < dim; ++k) v(k) += 0.15 * n(rng);
      m.store(v, "group" + std::to_string(g));
    }
  }
  return m;
}

/// Adds Gaussian noise whose norm is `fraction` of the vector's norm.
inline Eigen::VectorXd perturb(const Eigen::VectorXd& v, double fraction, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::VectorXd noise(v.size());
  for (Eigen::Index k = 0; k < v.size(); ++k) noise(k) = n(rng);
  return v + noise * (fraction * v.norm() / noise.norm());
}

}  // namespace blcs::testing
