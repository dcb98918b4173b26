#include <random>

#include "doctest.h"

#include "blcs/assoc_memory/relation_memory.hpp"
#include "blcs/common/error.hpp"
#include "memory_oracle.hpp"

using namespace blcs;
using namespace blcs::mem;

namespace {

Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index k = 0;
  for (double x : xs) v(k++) = x;
  return v;
}

}  // namespace

TEST_CASE("cosine handles zero vectors") {
  CHECK(cosine(vec({0, 0}), vec({1, 0})) == 0.0);
  CHECK(cosine(vec({2, 0}), vec({1, 0})) == doctest::Approx(1.0));
  CHECK(cosine(vec({1, 0}), vec({-3, 0})) == doctest::Approx(-1.0));
}

TEST_CASE("store creates groups and counts occurrences") {
  RelationMemory m(2);
  auto g = m.store(vec({1, 0}));
  CHECK(m.group_count() == 1);
  CHECK(m.groups().at(g).size() == 1);
  m.store(vec({1, 0}), g);
  CHECK(m.groups().at(g).size() == 2);
  CHECK(m.store(vec({0.99, 0.05})) == g);
  auto other = m.store(vec({0, 1}));
  CHECK(other != g);
  CHECK(m.group_count() == 2);
  CHECK_THROWS_AS(m.store(vec({1, 0, 0})), InvalidInput);
  CHECK_THROWS_AS(RelationMemory(0), InvalidInput);
}

TEST_CASE("unlabelled clusters split like nearest-centroid clustering") {
  std::mt19937_64 rng(21);
  std::normal_distribution<double> n(0.0, 0.05);
  const Eigen::VectorXd c[2] = {vec({1, 0, 0, 0}), vec({0, 0, 1, 1})};
  std::vector<Eigen::VectorXd> pts;
  std::vector<int> truth;
  for (int k = 0; k < 20; ++k) {
    int cl = k % 2;
    Eigen::VectorXd v = c[cl];
    for (int d = 0; d < 4; ++d) v(d) += n(rng);
    pts.push_back(v);
    truth.push_back(cl);
  }
  RelationMemory m(4);
  std::vector<std::string> groups;
  for (const auto& p : pts) groups.push_back(m.store(p));
  CHECK(m.group_count() == 2);
  // oracle: nearest centroid of the empirical clusters
  Eigen::VectorXd centroid[2] = {Eigen::VectorXd::Zero(4), Eigen::VectorXd::Zero(4)};
  for (std::size_t k = 0; k < pts.size(); ++k) centroid[truth[k]] += pts[k] / 10.0;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    int nearest = (pts[k] - centroid[0]).norm() < (pts[k] - centroid[1]).norm() ? 0 : 1;
    CHECK(groups[k] == groups[static_cast<std::size_t>(nearest)]);
  }
}

TEST_CASE("knn_assign basic contracts") {
  RelationMemory m(2);
  CHECK_THROWS_AS(m.knn_assign(vec({1, 0}), 1), NoRelations);
  m.store(vec({1, 0}), "a");
  m.store(vec({0, 1}), "b");
  m.store(vec({0.1, 1}), "b");
  CHECK(m.knn_assign(vec({1, 0}), 1) == "a");
  CHECK(m.knn_assign(vec({1, 0}), 50) == "b");
  CHECK(m.knn_assign(vec({5, 0.2}), 2) == "a");  // 1-1 tie goes to the nearest node's group
  CHECK(m.knn_assign(vec({1, 0.1}), 1) == m.knn_assign(vec({10, 1}), 1));
}

TEST_CASE("knn_assign matches a full-sort oracle on random memories") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_int_distribution<int> lab(0, 3);
  for (int trial = 0; trial < 20; ++trial) {
    RelationMemory m(6);
    std::vector<std::pair<Eigen::VectorXd, std::string>> stored;
    for (int k = 0; k < 15; ++k) {
      Eigen::VectorXd v(6);
      for (int d = 0; d < 6; ++d) v(d) = n(rng);
      std::string g = "L" + std::to_string(lab(rng));
      m.store(v, g);
      stored.emplace_back(v, g);
    }
    for (int q = 0; q < 10; ++q) {
      Eigen::VectorXd x(6);
      for (int d = 0; d < 6; ++d) x(d) = n(rng);
      std::vector<std::pair<double, std::size_t>> order;
      for (std::size_t k = 0; k < stored.size(); ++k) order.push_back({-testing::plain_cosine(x, stored[k].first), k});
      std::sort(order.begin(), order.end());
      std::map<std::string, int> count;
      for (int r = 0; r < 3; ++r) ++count[stored[order[static_cast<std::size_t>(r)].second].second];
      int top = 0;
      for (auto& [g, c] : count) top = std::max(top, c);
      std::string expect;
      for (int r = 0; r < 3 && expect.empty(); ++r) {
        const auto& g = stored[order[static_cast<std::size_t>(r)].second].second;
        if (count[g] == top) expect = g;
      }
      CHECK(m.knn_assign(x, 3) == expect);
      CHECK(m.knn_assign(x * 7.5, 3) == expect);
    }
  }
}

TEST_CASE("recall of a stored vector returns its group with confidence one") {
  auto m = testing::three_group_fixture(12, 5, 3);
  for (const auto& node : m.nodes()) {
    auto r = m.recall(node.vector);
    CHECK(r.group == node.group);
    CHECK(r.confidence == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(r.iterations <= 2);
    CHECK(r.iterations >= 1);
  }
}

TEST_CASE("single-iteration recall is a nearest-node lookup") {
  auto m = testing::three_group_fixture(12, 4, 8);
  std::mt19937_64 rng(1);
  for (int q = 0; q < 20; ++q) {
    auto x = testing::perturb(m.nodes()[static_cast<std::size_t>(q % 12)].vector, 0.5, rng);
    auto r = m.recall(x, 1);
    CHECK(r.iterations == 1);
    REQUIRE(r.visited.size() == 1);
    CHECK(r.visited[0] == m.ranked(x).front().node);
  }
  CHECK_THROWS_AS(m.recall(m.nodes()[0].vector, 0), InvalidInput);
  RelationMemory empty(12);
  CHECK_THROWS_AS(empty.recall(Eigen::VectorXd::Ones(12)), NoRelations);
}

TEST_CASE("noisy recall agrees with exhaustive trajectory enumeration") {
  auto m = testing::three_group_fixture(12, 4, 13);
  std::mt19937_64 rng(77);
  int correct = 0;
  const int queries = 30;
  for (int q = 0; q < queries; ++q) {
    const auto& node = m.nodes()[static_cast<std::size_t>(q % 12)];
    auto x = testing::perturb(node.vector, 0.1, rng);
    auto r = m.recall(x, 5);
    auto oracle = testing::exhaustive_recall_node(m, x, 5);
    REQUIRE(oracle.has_value());
    CHECK(r.visited.back() == *oracle);
    correct += r.group == node.group;
  }
  CHECK(correct == queries);
}

TEST_CASE("memory json round trip") {
  auto m = testing::three_group_fixture(6, 3, 2);
  m.store(Eigen::VectorXd::Ones(6));
  auto back = RelationMemory::from_json(nlohmann::json::parse(m.to_json().dump()));
  CHECK(back.to_json() == m.to_json());
  CHECK(back.group_count() == m.group_count());
}
