#include <doctest.h>

#include <cmath>
#include <string>

#include "lejapce/errors.hpp"
#include "lejapce/leja.hpp"
#include "lejapce/pce.hpp"
#include "support/generators.hpp"

using namespace lejapce;
using doctest::Approx;

namespace {

ProductDistribution uniform_cube(std::size_t dim) {
  return ProductDistribution(std::vector<Distribution>(dim, Distribution::uniform(-1, 1)));
}

double rms(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

}  // namespace

TEST_CASE("tensor basis") {
  const auto recs = recurrences_for(uniform_cube(2), {3, 3});
  CHECK(eval_basis(recs, MultiIndex{0, 0}, Eigen::Vector2d(0.3, -0.9)) == 1.0);
  CHECK(eval_basis(recs, MultiIndex{1, 0}, Eigen::Vector2d(1.0, 0.123)) == Approx(std::sqrt(3.0)).epsilon(1e-15));
  CHECK_THROWS_AS(eval_basis(recs, MultiIndex{4, 0}, Eigen::Vector2d(0, 0)), DomainError);

  gen::Rng rng(61);
  for (int k = 0; k < 20; ++k) {
    const Eigen::Vector2d y = gen::point(rng, 2, -1, 1);
    const int p = rng.integer(0, 3), q = rng.integer(0, 3);
    CHECK(eval_basis(recs, MultiIndex{p, q}, y) ==
          Approx(eval_basis(recs, MultiIndex{p, 0}, y) * eval_basis(recs, MultiIndex{0, q}, y)).epsilon(1e-14));
  }
}

TEST_CASE("small interpolation systems") {
  const ProductDistribution line({Distribution::uniform(-1, 1)});
  const auto recs = recurrences_for(line, {1});
  const std::vector<std::vector<double>> nodes{{0.0, -1.0}};

  Eigen::VectorXd g1(1);
  g1 << 4.5;
  CHECK(assemble_and_solve({MultiIndex{0}}, nodes, recs, g1).coefficients[0] == 4.5);

  // psi^1 = sqrt(3) y; g = y at the nodes 0 and -1
  const auto r = assemble_and_solve({MultiIndex{0}, MultiIndex{1}}, nodes, recs, Eigen::Vector2d(0.0, -1.0));
  CHECK(std::abs(r.coefficients[0]) < 1e-15);
  CHECK(r.coefficients[1] == Approx(1 / std::sqrt(3.0)).epsilon(1e-14));
  CHECK(r.residual_inf < 1e-15);
  CHECK_FALSE(r.residual_warning);
}

TEST_CASE("basis functions are reproduced exactly") {
  const auto p = ProductDistribution({Distribution::normal(1, 2), Distribution::gumbel(0, 1),
                                      Distribution::truncated_normal(0, 1, 0, 3)});
  const auto set = td_set(3, 4);
  const auto nodes = std::vector<std::vector<double>>{cached_leja_nodes(p[0], 5), cached_leja_nodes(p[1], 5),
                                                      cached_leja_nodes(p[2], 5)};
  const auto recs = recurrences_for(p, set.max_degrees());
  for (const auto& q : set) {
    Eigen::VectorXd g(static_cast<Eigen::Index>(set.size()));
    for (std::size_t k = 0; k < set.size(); ++k) g[static_cast<Eigen::Index>(k)] = eval_basis(recs, q, node_for(set[k], nodes));
    const auto c = assemble_and_solve(set.indices(), nodes, recs, g).coefficients;
    for (std::size_t k = 0; k < set.size(); ++k)
      CHECK(std::abs(c[static_cast<Eigen::Index>(k)] - (set[k] == q ? 1.0 : 0.0)) < 1e-10);
  }
}

TEST_CASE("singular systems are reported with the pivot") {
  Eigen::MatrixXd a(3, 3);
  a << 1, 2, 3, 2, 4, 6, 0, 1, 1;
  try {
    solve_collocation(a, Eigen::Vector3d(1, 2, 3));
    FAIL("expected a numerical error");
  } catch (const NumericalError& e) {
    CHECK(std::string(e.what()).find("pivot") != std::string::npos);
  }
  Eigen::MatrixXd bad = Eigen::MatrixXd::Identity(2, 2);
  bad(1, 1) = NAN;
  CHECK_THROWS_AS(solve_collocation(bad, Eigen::Vector2d(1, 1)), NumericalError);
  CHECK_THROWS(solve_collocation(Eigen::MatrixXd::Identity(2, 2), Eigen::Vector3d(1, 1, 1)));
}

TEST_CASE("transform keeps trivial structure") {
  const auto p = uniform_cube(2);
  FunctionModel constant("c", p, [](const auto&) { return -1.5; });
  const auto pc = transform_to_pce(adapt_hier(constant, p, MultiIndexSet::root(2), {0.0, 10}));
  CHECK(pc.coefficients[0] == Approx(-1.5).epsilon(1e-14));
  for (Eigen::Index k = 1; k < pc.coefficients.size(); ++k) CHECK(std::abs(pc.coefficients[k]) < 1e-14);

  FunctionModel linear("l", p, [](const auto& y) { return y[0]; });
  const auto pl = transform_to_pce(adapt_hier(linear, p, MultiIndexSet::root(2), {0.0, 15}));
  CHECK(std::abs(pl.coefficients[0]) < 1e-14);
  CHECK(pl.diagnostics.residual_inf < 1e-12);
}

TEST_CASE("hierarchical, transformed and direct forms agree on ishigami") {
  const auto model = make_builtin_model("ishigami");
  const auto& p = model->input_spec();
  const auto h = adapt_hier(*model, p, MultiIndexSet::root(3), {0.0, 300});
  const auto t = transform_to_pce(h);
  const auto d = build_pce(*model, p, h.set);
  CHECK(t.set.indices() == h.set.indices());
  const Eigen::MatrixXd y = sample(p, 1000, 17);
  const Eigen::VectorXd vh = eval_hier_batch(h, y), vt = eval_pce_batch(t, y), vd = eval_pce_batch(d, y);
  double worst = 0;
  for (Eigen::Index q = 0; q < y.rows(); ++q)
    worst = std::max({worst, std::abs(vt[q] - vh[q]) / (1 + std::abs(vh[q])), std::abs(vd[q] - vh[q]) / (1 + std::abs(vh[q]))});
  CHECK(worst < 1e-6);
}

TEST_CASE("polynomials inside the set are recovered") {
  gen::Rng rng(62);
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t dim = static_cast<std::size_t>(rng.integer(1, 3));
    std::vector<Distribution> laws;
    for (std::size_t n = 0; n < dim; ++n) laws.push_back(gen::distribution(rng));
    const ProductDistribution p(laws);
    const auto set = gen::dc_set(rng, dim, static_cast<std::size_t>(rng.integer(1, 18)));
    const auto recs = recurrences_for(p, set.max_degrees());
    Eigen::VectorXd truth = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(set.size()));
    for (Eigen::Index k = 0; k < truth.size(); ++k)
      if (rng.coin()) truth[k] = rng.uniform(-2, 2);
    FunctionModel model("poly", p, [&](const Eigen::Ref<const Eigen::VectorXd>& y) {
      double v = 0;
      for (std::size_t k = 0; k < set.size(); ++k) v += truth[static_cast<Eigen::Index>(k)] * eval_basis(recs, set[k], y);
      return v;
    });
    const auto pc = build_pce(model, p, set);
    INFO("trial ", trial, " size ", set.size());
    CHECK((pc.coefficients - truth).cwiseAbs().maxCoeff() < 1e-8);
    const Eigen::MatrixXd y = sample(p, 500, 100 + static_cast<std::uint64_t>(trial));
    CHECK(rms(eval_pce_batch(pc, y), model.evaluate_batch(y)) < 1e-10);
    const auto h = build_hier(model, p, set);
    CHECK(rms(eval_hier_batch(h, y), model.evaluate_batch(y)) < 1e-10);
  }
}

TEST_CASE("adaptive PCE on trivial models") {
  const auto p = uniform_cube(2);
  FunctionModel five("five", p, [](const auto&) { return 5.0; });
  const auto c = adapt_pce(five, p, MultiIndexSet::root(2), {1e-12, 100});
  CHECK(c.set.size() == 3);
  CHECK(c.diagnostics.growth_order.empty());
  CHECK(c.coefficients[0] == Approx(5.0).epsilon(1e-15));
  CHECK(c.coefficients.tail(2).cwiseAbs().maxCoeff() < 1e-12);

  const auto recs = recurrences_for(p, {2, 0});
  FunctionModel manufactured("m", p, [recs](const Eigen::Ref<const Eigen::VectorXd>& y) {
    return eval_basis(recs, MultiIndex{2, 0}, y) + 2.0;
  });
  const auto m = adapt_pce(manufactured, p, MultiIndexSet::root(2), {0.0, 20});
  REQUIRE(m.set.contains(MultiIndex{2, 0}));
  for (std::size_t k = 0; k < m.set.size(); ++k) {
    const double expected = m.set[k] == MultiIndex{0, 0} ? 2.0 : m.set[k] == MultiIndex{2, 0} ? 1.0 : 0.0;
    CHECK(std::abs(m.coefficients[static_cast<Eigen::Index>(k)] - expected) < 1e-8);
  }
}

TEST_CASE("adaptive PCE bookkeeping") {
  const auto model = make_builtin_model("meromorphic5");
  const auto& p = model->input_spec();
  EvaluationCache cache(*model);
  const auto s = adapt_pce(*model, p, MultiIndexSet::root(5), {0.0, 150}, &cache);
  CHECK(cache.model_calls() == s.set.size());
  CHECK(s.set.size() >= 150);
  auto core = MultiIndexSet::root(5);
  for (const auto& i : s.diagnostics.growth_order) core.insert(i);
  CHECK(with_admissible(core).indices() == s.set.indices());

  double gmax = 1;
  for (Eigen::Index k = 0; k < s.values.size(); ++k) gmax = std::max(gmax, std::abs(s.values[k]));
  for (std::size_t k = 0; k < s.set.size(); ++k)
    CHECK(std::abs(eval_pce(s, node_for(s.set[k], s.nodes)) - s.values[static_cast<Eigen::Index>(k)]) <= 1e-8 * gmax);
  CHECK(s.diagnostics.residual_inf <= 1e-8 * gmax);

  // the returned coefficients equal a fresh solve on the final set
  const auto fresh = build_pce(*model, p, s.set);
  CHECK((fresh.coefficients - s.coefficients).cwiseAbs().maxCoeff() < 1e-12);

  const auto again = adapt_pce(*model, p, MultiIndexSet::root(5), {0.0, 150});
  CHECK(again.diagnostics.growth_order == s.diagnostics.growth_order);
  CHECK(again.coefficients == s.coefficients);

  CHECK_THROWS_AS(adapt_pce(*model, p, MultiIndexSet::root(5), {0.0, 5}), ConfigError);
  CHECK_THROWS_AS(adapt_pce(*model, p, MultiIndexSet::root(5), {-1e-3, 50}), ConfigError);
}

TEST_CASE("ties in the coefficient indicator") {
  const auto p = uniform_cube(2);
  FunctionModel model("sym", p, [](const auto& y) { return y[0] + y[1]; });
  const auto s = adapt_pce(model, p, MultiIndexSet::root(2), {0.0, 6});
  REQUIRE(!s.diagnostics.growth_order.empty());
  CHECK(s.diagnostics.growth_order[0] == MultiIndex{0, 1});
}

TEST_CASE("evaluation") {
  const auto p = uniform_cube(2);
  PceSurrogate z;
  z.pdist = p;
  z.set = td_set(2, 2);
  z.coefficients = Eigen::VectorXd::Zero(6);
  z.recurrences = recurrences_for(p, {2, 2});
  z.nodes = {cached_leja_nodes(p[0], 3), cached_leja_nodes(p[1], 3)};
  gen::Rng rng(63);
  for (int k = 0; k < 10; ++k) CHECK(eval_pce(z, gen::point(rng, 2, -1, 1)) == 0.0);
  z.coefficients[0] = 2.5;
  for (int k = 0; k < 10; ++k) CHECK(eval_pce(z, gen::point(rng, 2, -1, 1)) == Approx(2.5).epsilon(1e-15));
  CHECK_THROWS_AS(eval_pce(z, Eigen::Vector3d(0, 0, 0)), DomainError);
}

TEST_CASE("borehole adaptive PCE improves tenfold from 100 to 1000 points") {
  const auto model = make_builtin_model("borehole");
  const auto& p = model->input_spec();
  const Eigen::MatrixXd y = sample(p, 10000, 3);
  const Eigen::VectorXd g = model->evaluate_batch(y);
  const double small = rms(eval_pce_batch(adapt_pce(*model, p, MultiIndexSet::root(8), {0.0, 100}), y), g);
  const double large = rms(eval_pce_batch(adapt_pce(*model, p, MultiIndexSet::root(8), {0.0, 1000}), y), g);
  INFO("cv at 100: ", small, ", at 1000: ", large);
  CHECK(large * 10 <= small);
}
