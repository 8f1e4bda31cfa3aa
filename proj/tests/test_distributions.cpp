#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include <boost/math/distributions/extreme_value.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "lejapce/distributions.hpp"
#include "lejapce/errors.hpp"
#include "lejapce/models.hpp"
#include "support/generators.hpp"

using namespace lejapce;
using doctest::Approx;

namespace {

double integrate(const std::function<double(double)>& f, double a, double b) {
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 15, 1e-13);
}

std::vector<Distribution> shipped() {
  std::vector<Distribution> out{Distribution::uniform(-1, 1), Distribution::normal(0, 1),
                                Distribution::truncated_normal(0, 1, 0, 3), Distribution::gumbel(0, 1)};
  for (const auto& p : {cantilever_inputs(), borehole_inputs(), steel_column_inputs(), meromorphic16_inputs(),
                        ishigami_inputs()})
    for (const auto& d : p.marginals()) out.push_back(d);
  return out;
}

}  // namespace

TEST_CASE("pdf point values") {
  CHECK(Distribution::uniform(-1, 1).pdf(0.0) == Approx(0.5).epsilon(1e-15));
  CHECK(Distribution::gumbel(0, 1).pdf(0.0) == Approx(std::exp(-1.0)).epsilon(1e-14));
  CHECK(Distribution::truncated_normal(0, 1, 0, 3).pdf(-0.5) == 0.0);
  CHECK(Distribution::uniform(-1, 1).pdf(1.5) == 0.0);

  // phi(y) / (Phi(3) - Phi(0)) from Boost's normal
  const boost::math::normal_distribution<double> z;
  const double mass = boost::math::cdf(z, 3.0) - 0.5;
  CHECK(Distribution::truncated_normal(0, 1, 0, 3).pdf(1.2) == Approx(boost::math::pdf(z, 1.2) / mass).epsilon(1e-13));
  // variance, not standard deviation
  CHECK(Distribution::normal(1, 4).pdf(1.0) == Approx(1.0 / std::sqrt(2 * std::numbers::pi * 4)).epsilon(1e-14));
}

TEST_CASE("invalid parameters are rejected") {
  CHECK_THROWS_AS(Distribution::uniform(1, 1), ConfigError);
  CHECK_THROWS_AS(Distribution::normal(0, 0), ConfigError);
  CHECK_THROWS_AS(Distribution::normal(0, -1), ConfigError);
  CHECK_THROWS_AS(Distribution::truncated_normal(0, 1, 2, 1), ConfigError);
  CHECK_THROWS_AS(Distribution::truncated_normal(0, 0, 0, 1), ConfigError);
  CHECK_THROWS_AS(Distribution::gumbel(0, 0), ConfigError);
  CHECK_THROWS_AS(Distribution::uniform(0, NAN), ConfigError);
}

TEST_CASE("quantiles") {
  CHECK(Distribution::uniform(-1, 1).quantile(0.5) == Approx(0.0).epsilon(1e-15));
  CHECK(std::abs(Distribution::normal(0, 1).quantile(0.5)) < 1e-15);
  CHECK(std::abs(Distribution::gumbel(0, 1).quantile(std::exp(-1.0))) < 1e-14);
  CHECK(Distribution::gumbel(0, 1).median() == Approx(-std::log(std::log(2.0))).epsilon(1e-14));
  CHECK_THROWS_AS(Distribution::normal(0, 1).quantile(0.0), DomainError);
  CHECK_THROWS_AS(Distribution::normal(0, 1).quantile(1.0), DomainError);
  CHECK_THROWS_AS(Distribution::normal(0, 1).quantile(-0.2), DomainError);

  const boost::math::normal_distribution<double> n01;
  const boost::math::extreme_value_distribution<double> g(559495, 70173);
  for (double q : {1e-8, 0.01, 0.3, 0.5, 0.77, 0.999, 1 - 1e-8}) {
    CHECK(Distribution::normal(0, 1).quantile(q) == Approx(boost::math::quantile(n01, q)).epsilon(1e-12));
    CHECK(Distribution::gumbel(559495, 70173).quantile(q) == Approx(boost::math::quantile(g, q)).epsilon(1e-12));
  }
}

TEST_CASE("truncated normal median and mean against quadrature") {
  const auto tn = Distribution::truncated_normal(0, 1, 0, 3);
  const double mean = integrate([&](double y) { return y * tn.pdf(y); }, 0, 3);
  CHECK(tn.mean() == Approx(mean).epsilon(1e-12));
  CHECK(tn.mean() == Approx(0.7911568260634169).epsilon(1e-12));
  // CDF at the median, by quadrature of the density
  const double med = tn.median();
  CHECK(integrate([&](double y) { return tn.pdf(y); }, 0, med) == Approx(0.5).epsilon(1e-12));
  CHECK(med == Approx(0.6723672950630585).epsilon(1e-12));
}

TEST_CASE("effective support") {
  const auto u = Distribution::uniform(-1, 1).effective_support();
  CHECK(u.lo == -1.0);
  CHECK(u.hi == 1.0);
  const auto t = Distribution::truncated_normal(0, 1, 0, 3).effective_support();
  CHECK(t.lo == 0.0);
  CHECK(t.hi == 3.0);
  const boost::math::normal_distribution<double> n01;
  const auto n = Distribution::normal(0, 1).effective_support();
  CHECK(n.hi == Approx(boost::math::quantile(n01, 1 - 1e-8)).epsilon(1e-10));
  CHECK(n.lo == Approx(-5.612).epsilon(1e-3));
  CHECK(n.hi == Approx(5.612).epsilon(1e-3));
}

TEST_CASE("density mass over the effective support") {
  for (const auto& d : shipped()) {
    const auto s = d.effective_support();
    // split at the mode region so the adaptive rule sees the peak
    const double mid = d.median();
    const double mass = integrate([&](double y) { return d.pdf(y); }, s.lo, mid) +
                        integrate([&](double y) { return d.pdf(y); }, mid, s.hi);
    INFO(d.describe());
    CHECK(mass >= 1 - 1e-6);
    CHECK(mass <= 1 + 1e-10);
  }
}

TEST_CASE("bounded densities integrate to one") {
  gen::Rng rng(11);
  for (int trial = 0; trial < 40; ++trial) {
    const auto d = gen::distribution(rng);
    if (!d.is_bounded()) continue;
    const auto s = d.effective_support();
    boost::math::quadrature::tanh_sinh<double> ts;
    const double mass = ts.integrate([&](double y) { return d.pdf(y); }, s.lo, s.hi);
    INFO(d.describe());
    CHECK(mass == Approx(1.0).epsilon(1e-10));
  }
}

TEST_CASE("quantile inverts the cdf on interior points") {
  gen::Rng rng(12);
  std::vector<Distribution> laws = shipped();
  for (int trial = 0; trial < 20; ++trial) laws.push_back(gen::distribution(rng));
  for (const auto& d : laws) {
    const auto s = d.effective_support();
    for (int k = 1; k <= 100; ++k) {
      const double y = s.lo + (s.hi - s.lo) * k / 101.0;
      const double q = d.cdf(y);
      if (q <= 0.0 || q >= 1.0) continue;
      INFO(d.describe(), " y=", y);
      // q carries an absolute rounding error of a few ulps of 1, which moves
      // the exact inverse by about eps / pdf(y) in the tails
      const double conditioning = 8 * std::numeric_limits<double>::epsilon() / d.pdf(y);
      CHECK(std::abs(d.quantile(q) - y) <= 1e-9 * std::max(1.0, std::abs(y)) + conditioning);
    }
  }
}

TEST_CASE("quantile is monotone") {
  gen::Rng rng(13);
  for (int trial = 0; trial < 30; ++trial) {
    const auto d = gen::distribution(rng);
    double prev = -INFINITY;
    for (int k = 1; k < 200; ++k) {
      const double y = d.quantile(k / 200.0);
      CHECK(y >= prev);
      prev = y;
    }
  }
}

TEST_CASE("sampling") {
  const ProductDistribution cube(std::vector<Distribution>(3, Distribution::uniform(-1, 1)));
  CHECK_THROWS_AS(sample(cube, 0, 1), DomainError);

  const Eigen::MatrixXd one_a = sample(cube, 1, 99), one_b = sample(cube, 1, 99);
  CHECK(one_a == one_b);

  const Eigen::MatrixXd a = sample(cube, 100000, 7);
  CHECK(a == sample(cube, 100000, 7));
  CHECK(a != sample(cube, 100000, 8));
  for (Eigen::Index n = 0; n < 3; ++n) CHECK(std::abs(a.col(n).mean()) < 0.02);
  CHECK(a.minCoeff() >= -1.0);
  CHECK(a.maxCoeff() <= 1.0);

  const ProductDistribution gumbel({Distribution::gumbel(0, 1)});
  CHECK(std::abs(sample(gumbel, 100000, 3).col(0).mean() - 0.5772156649015329) < 0.02);
}

TEST_CASE("uniform stream is portable") {
  // top 53 bits of std::mt19937_64, centred in their cell
  std::mt19937_64 reference(2024);
  UniformStream stream(2024);
  for (int k = 0; k < 1000; ++k) {
    const double expected = (static_cast<double>(reference() >> 11) + 0.5) / 9007199254740992.0;
    REQUIRE(stream.next() == expected);
  }
}

TEST_CASE("product density") {
  const ProductDistribution p({Distribution::uniform(-1, 1), Distribution::normal(0, 1)});
  Eigen::Vector2d y(0.3, 0.4);
  CHECK(p.pdf(y) == Approx(0.5 * std::exp(-0.08) / std::sqrt(2 * std::numbers::pi)).epsilon(1e-14));
  CHECK_THROWS_AS(p.pdf(Eigen::Vector3d(0, 0, 0)), DomainError);
  CHECK_THROWS_AS(ProductDistribution(std::vector<Distribution>{}), ConfigError);
}
