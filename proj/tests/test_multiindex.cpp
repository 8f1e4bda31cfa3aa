#include <doctest.h>

#include <algorithm>
#include <set>

#include "lejapce/errors.hpp"
#include "lejapce/leja.hpp"
#include "lejapce/multiindex.hpp"
#include "support/generators.hpp"

using namespace lejapce;

namespace {

using Indices = std::vector<MultiIndex>;

// Every index with entries <= bound, used to brute-force the frontier.
Indices box(std::size_t dim, int bound) {
  Indices out;
  MultiIndex i(dim);
  while (true) {
    out.push_back(i);
    std::size_t n = 0;
    while (n < dim && i[n] == bound) i[n++] = 0;
    if (n == dim) break;
    ++i[n];
  }
  return out;
}

bool dc_by_definition(const Indices& set) {
  const std::set<MultiIndex> members(set.begin(), set.end());
  for (const auto& i : set)
    for (std::size_t n = 0; n < i.dim(); ++n)
      if (i[n] > 0 && !members.count(i.minus_unit(n))) return false;
  return true;
}

long long binomial(int n, int k) {
  long long v = 1;
  for (int j = 1; j <= k; ++j) v = v * (n - k + j) / j;
  return v;
}

}  // namespace

TEST_CASE("downward closedness") {
  CHECK(MultiIndexSet::from_list(2, {{0, 0}}).is_downward_closed());
  CHECK_FALSE(MultiIndexSet::from_list(2, {{0, 0}, {1, 0}, {1, 1}}).is_downward_closed());
  CHECK_FALSE(MultiIndexSet::from_list(2, {{1, 0}}).is_downward_closed());
  for (std::size_t dim = 1; dim <= 4; ++dim)
    for (int p = 0; p <= 5; ++p) CHECK(td_set(dim, p).is_downward_closed());
  CHECK_THROWS_AS(MultiIndexSet::from_list(2, {{0, 0}, {0, 0}}), ConfigError);
}

TEST_CASE("admissible sets") {
  CHECK(MultiIndexSet::root(2).admissible() == Indices{{0, 1}, {1, 0}});
  CHECK(MultiIndexSet::from_list(2, {{0, 0}, {1, 0}}).admissible() == Indices{{0, 1}, {2, 0}});
  CHECK(MultiIndexSet::from_list(1, {{0}, {1}, {2}}).admissible() == Indices{{3}});
  CHECK_THROWS_AS(MultiIndexSet::from_list(2, {{0, 0}, {1, 1}}).admissible(), ContractViolation);
}

TEST_CASE("admissible set matches brute force on random sets") {
  gen::Rng rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t dim = static_cast<std::size_t>(rng.integer(1, 4));
    const auto set = gen::dc_set(rng, dim, static_cast<std::size_t>(rng.integer(1, 30)));
    REQUIRE(set.is_downward_closed());
    REQUIRE(dc_by_definition(set.indices()));

    Indices expected;
    for (const auto& i : box(dim, 31 / static_cast<int>(dim) + 1)) {
      if (set.contains(i)) continue;
      Indices with = set.indices();
      with.push_back(i);
      if (dc_by_definition(with)) expected.push_back(i);
    }
    std::sort(expected.begin(), expected.end());
    const auto adm = set.admissible();
    CHECK(adm == expected);
    for (const auto& i : adm) CHECK_FALSE(set.contains(i));
    CHECK(with_admissible(set).is_downward_closed());
    for (const auto& i : adm) {
      auto grown = set;
      grown.insert(i);
      CHECK(grown.is_downward_closed());
    }
  }
}

TEST_CASE("insert rejects non-admissible indices") {
  auto set = MultiIndexSet::root(2);
  CHECK_THROWS_AS(set.insert(MultiIndex{1, 1}), ContractViolation);
  CHECK_THROWS_AS(set.insert(MultiIndex{0, 0}), ContractViolation);
  CHECK_THROWS_AS(set.insert(MultiIndex{0, 0, 1}), ContractViolation);
  set.insert(MultiIndex{1, 0});
  CHECK(set.position(MultiIndex{1, 0}) == 1);
  CHECK_THROWS_AS(set.position(MultiIndex{5, 0}), ContractViolation);
  MultiIndexSet empty(3);
  empty.insert(MultiIndex::zero(3));
  CHECK(empty.size() == 1);
}

TEST_CASE("total degree sets") {
  CHECK(td_set(2, 2).indices() == Indices{{0, 0}, {0, 1}, {1, 0}, {0, 2}, {1, 1}, {2, 0}});
  CHECK(td_set(3, 0).indices() == Indices{{0, 0, 0}});
  CHECK(td_set(3, 12).size() == 455);
  for (std::size_t dim = 1; dim <= 5; ++dim)
    for (int p = 0; p <= 6; ++p) {
      const auto set = td_set(dim, p);
      CHECK(static_cast<long long>(set.size()) == binomial(static_cast<int>(dim) + p, static_cast<int>(dim)));
      CHECK(std::is_sorted(set.begin(), set.end(), graded_lex_less));
      for (const auto& i : set) CHECK(i.total_degree() <= p);
    }
}

TEST_CASE("graded lexicographic listing keeps insertion order separate") {
  auto set = MultiIndexSet::root(2);
  set.insert(MultiIndex{1, 0});
  set.insert(MultiIndex{2, 0});
  set.insert(MultiIndex{0, 1});
  CHECK(set.indices() == Indices{{0, 0}, {1, 0}, {2, 0}, {0, 1}});
  CHECK(set.graded_lex_order() == Indices{{0, 0}, {0, 1}, {1, 0}, {2, 0}});
  CHECK(set.max_degrees() == std::vector<int>{2, 1});
}

TEST_CASE("grid points") {
  const auto u = cached_leja_nodes(Distribution::uniform(-1, 1), 3);
  const std::vector<std::vector<double>> nodes{u, u};
  CHECK(node_for(MultiIndex{0, 0}, nodes) == Eigen::Vector2d(0, 0));
  CHECK(node_for(MultiIndex{1, 2}, nodes) == Eigen::Vector2d(-1, 1));
  CHECK(node_for(MultiIndex{2, 1}, nodes) == Eigen::Vector2d(1, -1));
  CHECK_THROWS_AS(node_for(MultiIndex{3, 0}, nodes), ContractViolation);
  CHECK_THROWS_AS(node_for(MultiIndex{0, 0, 0}, nodes), ContractViolation);
}

TEST_CASE("one grid point per multi-index") {
  gen::Rng rng(42);
  const auto g = cached_leja_nodes(Distribution::gumbel(0, 1), 40);
  const auto n = cached_leja_nodes(Distribution::normal(0, 1), 40);
  for (int trial = 0; trial < 20; ++trial) {
    const auto set = gen::dc_set(rng, 3, static_cast<std::size_t>(rng.integer(1, 60)));
    std::set<std::vector<double>> points;
    for (const auto& i : set) {
      const Eigen::VectorXd y = node_for(i, {g, n, g});
      points.insert(std::vector<double>(y.data(), y.data() + y.size()));
    }
    CHECK(points.size() == set.size());
  }
}

TEST_CASE("multi-index helpers") {
  const MultiIndex i{2, 0, 3};
  CHECK(i.total_degree() == 5);
  CHECK(i.max_entry() == 3);
  CHECK(i.support_size() == 2);
  CHECK(i.plus_unit(1) == MultiIndex{2, 1, 3});
  CHECK(MultiIndex::unit(3, 2) == MultiIndex{0, 0, 1});
  CHECK(graded_lex_less(MultiIndex{0, 5}, MultiIndex{1, 5}));
  CHECK(graded_lex_less(MultiIndex{0, 2}, MultiIndex{1, 1}));
  CHECK_THROWS(MultiIndex{-1, 0});
}
