#include <doctest.h>

#include <cmath>

#include "lejapce/errors.hpp"
#include "lejapce/hierarchical.hpp"
#include "lejapce/leja.hpp"
#include "support/generators.hpp"

using namespace lejapce;
using doctest::Approx;

namespace {

ProductDistribution uniform_cube(std::size_t dim) {
  return ProductDistribution(std::vector<Distribution>(dim, Distribution::uniform(-1, 1)));
}

FunctionModel function_model(ProductDistribution p, FunctionModel::Function f) {
  return FunctionModel("test", std::move(p), std::move(f));
}

// N_i(y) straight from the product formula.
double newton_basis(const HierSurrogate& s, const MultiIndex& i, const Eigen::VectorXd& y) {
  double v = 1.0;
  for (std::size_t n = 0; n < i.dim(); ++n)
    v *= newton_eval<double>(s.nodes[n], i[n], y[static_cast<Eigen::Index>(n)]);
  return v;
}

HierSurrogate prefix(const HierSurrogate& s, std::size_t count) {
  HierSurrogate out = s;
  out.set = MultiIndexSet::from_list(s.set.dim(),
                                     std::vector<MultiIndex>(s.set.indices().begin(), s.set.indices().begin() + count));
  out.surpluses = s.surpluses.head(static_cast<Eigen::Index>(count));
  out.values = s.values.head(static_cast<Eigen::Index>(count));
  return out;
}

}  // namespace

TEST_CASE("modified Newton polynomials") {
  const std::vector<double> u{0.0, -1.0, 1.0};
  for (double y : {-0.7, 0.0, 0.3, 2.0}) {
    CHECK(newton_eval<double>(u, 0, y) == 1.0);
    CHECK(newton_eval<double>(u, 1, y) == Approx(-y));
  }
  CHECK(newton_eval<double>(u, 1, -1.0) == 1.0);
  CHECK(newton_eval<double>(u, 1, 0.0) == 0.0);
  CHECK_THROWS_AS(newton_eval<double>(u, 3, 0.0), ContractViolation);
  CHECK_THROWS_AS(newton_eval<double>(u, -1, 0.0), ContractViolation);

  gen::Rng rng(51);
  for (int trial = 0; trial < 10; ++trial) {
    const auto nodes = cached_leja_nodes(gen::distribution(rng), 25);
    for (int i = 0; i < 25; ++i)
      for (int k = 0; k <= i; ++k)
        CHECK(newton_eval<double>(nodes, i, nodes[static_cast<std::size_t>(k)]) == (k == i ? 1.0 : 0.0));
  }
}

TEST_CASE("evaluation of simple surrogates") {
  const auto p = uniform_cube(2);
  const auto constant = function_model(p, [](const auto&) { return 3.25; });
  const auto s = build_hier(constant, p, MultiIndexSet::root(2));
  gen::Rng rng(52);
  for (int k = 0; k < 20; ++k) CHECK(eval_hier(s, gen::point(rng, 2, -1, 1)) == 3.25);
  CHECK_THROWS_AS(eval_hier(s, Eigen::Vector3d(0, 0, 0)), DomainError);
  CHECK_THROWS_AS(eval_hier_batch(s, Eigen::MatrixXd::Zero(4, 3)), DomainError);

  const auto five = function_model(p, [](const auto&) { return 5.0; });
  const auto adapted = adapt_hier(five, p, MultiIndexSet::root(2), {0.0, 40});
  for (Eigen::Index k = 1; k < adapted.surpluses.size(); ++k) CHECK(std::abs(adapted.surpluses[k]) < 1e-14);
  for (int k = 0; k < 20; ++k) CHECK(eval_hier(adapted, gen::point(rng, 2, -1, 1)) == Approx(5.0).epsilon(1e-14));

  const auto linear = function_model(p, [](const auto& y) { return y[0]; });
  const auto lin = build_hier(linear, p, MultiIndexSet::from_list(2, {{0, 0}, {1, 0}}));
  double worst = 0;
  for (int k = 0; k < 100; ++k) {
    const Eigen::VectorXd y = gen::point(rng, 2, -1, 1);
    worst = std::max(worst, std::abs(eval_hier(lin, y) - y[0]));
  }
  CHECK(worst < 1e-12);

  Eigen::MatrixXd pts(30, 2);
  for (Eigen::Index q = 0; q < 30; ++q) pts.row(q) = gen::point(rng, 2, -1, 1).transpose();
  const Eigen::VectorXd batch = eval_hier_batch(lin, pts);
  for (Eigen::Index q = 0; q < 30; ++q) CHECK(batch[q] == eval_hier(lin, pts.row(q).transpose()));
}

TEST_CASE("surpluses") {
  const ProductDistribution line({Distribution::uniform(-1, 1)});
  const auto square = function_model(line, [](const auto& y) { return y[0] * y[0]; });
  HierSurrogate empty{line, MultiIndexSet(1), {}, {}, {}, {}};
  CHECK(surplus(square, empty, MultiIndex{0}) == 0.0);

  const auto offset = function_model(line, [](const auto& y) { return y[0] * y[0] + 0.5; });
  CHECK(surplus(offset, empty, MultiIndex{0}) == 0.5);

  // nodes 0, -1, 1: s_1 = g(-1) = 1, nu^1(1) = -1, so s_2 = 1 - (0 + 1 * -1) = 2
  const auto s = build_hier(square, line, MultiIndexSet::from_list(1, {{0}, {1}}));
  CHECK(s.surpluses[0] == 0.0);
  CHECK(s.surpluses[1] == 1.0);
  CHECK(surplus(square, s, MultiIndex{2}) == Approx(2.0).epsilon(1e-15));
  CHECK_THROWS_AS(surplus(square, s, MultiIndex{3}), ContractViolation);

  const auto p = uniform_cube(3);
  const auto constant = function_model(p, [](const auto&) { return -2.0; });
  const auto c = build_hier(constant, p, td_set(3, 2));
  for (const auto& i : c.set.admissible()) CHECK(std::abs(surplus(constant, c, i)) < 1e-14);
}

TEST_CASE("adaptation on trivial models") {
  const auto p = uniform_cube(3);
  const auto constant = function_model(p, [](const auto&) { return 7.0; });
  const auto s = adapt_hier(constant, p, MultiIndexSet::root(3), {1e-12, 100});
  CHECK(s.growth_order.empty());
  CHECK(s.set.indices() == std::vector<MultiIndex>{{0, 0, 0}, {0, 0, 1}, {0, 1, 0}, {1, 0, 0}});

  const auto p2 = uniform_cube(2);
  const auto linear = function_model(p2, [](const auto& y) { return y[0]; });
  const auto lin = adapt_hier(linear, p2, MultiIndexSet::root(2), {1e-12, 500});
  const Eigen::MatrixXd cv = sample(p2, 2000, 5);
  CHECK((eval_hier_batch(lin, cv) - cv.col(0)).norm() / std::sqrt(2000.0) < 1e-12);
}

TEST_CASE("argument checks") {
  const auto p = uniform_cube(3);
  const auto model = function_model(p, [](const auto& y) { return y.sum(); });
  CHECK_THROWS_AS(adapt_hier(model, p, MultiIndexSet::root(3), {0.0, 3}), ConfigError);
  CHECK_NOTHROW(adapt_hier(model, p, MultiIndexSet::root(3), {0.0, 4}));
  CHECK_THROWS_AS(adapt_hier(model, p, MultiIndexSet::root(3), {-1.0, 50}), ConfigError);
  CHECK_THROWS_AS(adapt_hier(model, p, MultiIndexSet::root(2), {0.0, 50}), ConfigError);
  CHECK_THROWS_AS(adapt_hier(model, p, MultiIndexSet(3), {0.0, 50}), ConfigError);
  CHECK_THROWS_AS(adapt_hier(model, p, MultiIndexSet::from_list(3, {{0, 0, 0}, {0, 1, 1}}), {0.0, 50}), ConfigError);
}

TEST_CASE("ties go to the lexicographically smallest index") {
  const auto p = uniform_cube(2);
  const auto model = function_model(p, [](const auto& y) { return y[0] * y[0] + y[1] * y[1]; });
  const auto s = adapt_hier(model, p, MultiIndexSet::root(2), {0.0, 6});
  REQUIRE(!s.growth_order.empty());
  CHECK(s.growth_order[0] == MultiIndex{0, 1});
}

TEST_CASE("hierarchy invariants on random models") {
  gen::Rng rng(53);
  for (int trial = 0; trial < 8; ++trial) {
    const std::size_t dim = static_cast<std::size_t>(rng.integer(1, 4));
    std::vector<Distribution> laws;
    for (std::size_t n = 0; n < dim; ++n) laws.push_back(gen::distribution(rng));
    const ProductDistribution p(laws);
    Eigen::VectorXd w(static_cast<Eigen::Index>(dim)), c(static_cast<Eigen::Index>(dim));
    for (Eigen::Index n = 0; n < w.size(); ++n) {
      w[n] = rng.uniform(-1, 1);
      c[n] = p[static_cast<std::size_t>(n)].median();
    }
    const auto model = function_model(p, [w, c](const Eigen::Ref<const Eigen::VectorXd>& y) {
      const Eigen::VectorXd z = (y - c).cwiseQuotient(Eigen::VectorXd::Ones(y.size()) + c.cwiseAbs());
      return std::exp(0.3 * w.dot(z)) + std::sin(z.sum());
    });
    EvaluationCache cache(model);
    const auto s = adapt_hier(model, p, MultiIndexSet::root(dim), {0.0, 60}, &cache);
    INFO("trial ", trial);

    // every evaluation is in the surrogate, and the surrogate interpolates
    CHECK(cache.model_calls() == s.set.size());
    CHECK(s.set.is_downward_closed());
    double gmax = 1.0;
    for (Eigen::Index k = 0; k < s.values.size(); ++k) gmax = std::max(gmax, std::abs(s.values[k]));
    for (std::size_t k = 0; k < s.set.size(); ++k) {
      const Eigen::VectorXd y = node_for(s.set[k], s.nodes);
      CHECK(s.values[static_cast<Eigen::Index>(k)] == model(y));
      CHECK(std::abs(eval_hier(s, y) - model(y)) <= 1e-8 * gmax);
    }

    // adding an index leaves earlier surpluses alone
    const auto rebuilt = build_hier(model, p, s.set);
    for (Eigen::Index k = 0; k < s.surpluses.size(); ++k)
      CHECK(std::abs(rebuilt.surpluses[k] - s.surpluses[k]) <= 1e-12 * gmax);

    // telescoping sums
    for (int q = 0; q < 5; ++q) {
      Eigen::VectorXd y(static_cast<Eigen::Index>(dim));
      for (std::size_t n = 0; n < dim; ++n) y[static_cast<Eigen::Index>(n)] = p[n].quantile(rng.uniform(0.01, 0.99));
      for (std::size_t k = 1; k < s.set.size(); k += 7) {
        const double lhs = eval_hier(prefix(s, k + 1), y);
        const double rhs = eval_hier(prefix(s, k), y) + s.surpluses[static_cast<Eigen::Index>(k)] * newton_basis(s, s.set[k], y);
        CHECK(lhs == Approx(rhs).epsilon(1e-10).scale(gmax));
      }
    }

    // determinism
    const auto again = adapt_hier(model, p, MultiIndexSet::root(dim), {0.0, 60});
    CHECK(again.growth_order == s.growth_order);
    CHECK(again.set.indices() == s.set.indices());
    CHECK(again.surpluses == s.surpluses);
  }
}

TEST_CASE("result covers the set and its final frontier") {
  const auto p = uniform_cube(2);
  const auto model = function_model(p, [](const auto& y) { return std::exp(y[0] + 0.3 * y[1]); });
  const auto s = adapt_hier(model, p, MultiIndexSet::root(2), {0.0, 30});
  auto core = MultiIndexSet::root(2);
  for (const auto& i : s.growth_order) core.insert(i);
  CHECK(with_admissible(core).indices() == s.set.indices());
  CHECK(s.set.size() >= 30);
  CHECK(core.size() + core.admissible().size() == s.set.size());
}

TEST_CASE("tolerance stop uses the summed frontier surpluses") {
  const auto p = uniform_cube(2);
  const auto model = function_model(p, [](const auto& y) { return 1.0 + y[0] + 0.5 * y[1] * y[1]; });
  const auto s = adapt_hier(model, p, MultiIndexSet::root(2), {1e-10, 1000});
  CHECK(s.set.size() < 20);
  double frontier = 0;
  auto core = MultiIndexSet::root(2);
  for (const auto& i : s.growth_order) core.insert(i);
  for (const auto& i : core.admissible()) frontier += std::abs(s.surpluses[static_cast<Eigen::Index>(s.set.position(i))]);
  CHECK(frontier <= 1e-10);
}

TEST_CASE("ishigami surpluses vanish on the first uniform Leja nodes") {
  // sin vanishes at 0 and +-pi, so the second-level surplus in y1 is pure
  // round-off and the adaptive search cannot reach level 3 there.
  const auto model = make_builtin_model("ishigami");
  const auto p = model->input_spec();
  const auto s = build_hier(*model, p, MultiIndexSet::from_list(3, {{0, 0, 0}, {1, 0, 0}}));
  CHECK(std::abs(surplus(*model, s, MultiIndex{2, 0, 0})) < 1e-15);
}
