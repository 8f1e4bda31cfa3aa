// Quasi-Monte Carlo mean and variance of the built-in models, used to pin the
// moment references in the harness. Slow: run once by hand.
//
//   lejapce_reference_moments [points] [model...]

#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <boost/random/sobol.hpp>

#include "lejapce/models.hpp"

int main(int argc, char** argv) {
  using namespace lejapce;
  const long long count = argc > 1 ? std::atoll(argv[1]) : 10'000'000LL;
  std::vector<std::string> names;
  for (int k = 2; k < argc; ++k) names.emplace_back(argv[k]);
  if (names.empty()) names = builtin_model_names();

  for (const auto& name : names) {
    const auto model = make_builtin_model(name);
    const auto& pdist = model->input_spec();
    const std::size_t dim = pdist.dim();
    boost::random::sobol engine(dim);
    engine.discard(dim);  // skip the all-zero point
    Eigen::VectorXd y(static_cast<Eigen::Index>(dim));
    // Welford's update keeps the variance accurate for large means.
    long double m = 0.0L, s = 0.0L;
    for (long long q = 1; q <= count; ++q) {
      for (std::size_t n = 0; n < dim; ++n) {
        const double u = (static_cast<double>(engine() >> 11) + 0.5) / 9007199254740992.0;
        y[static_cast<Eigen::Index>(n)] = pdist[n].quantile(u);
      }
      const long double g = (*model)(y);
      const long double d = g - m;
      m += d / q;
      s += d * (g - m);
    }
    std::printf("%s mean %.12e variance %.12e (%lld points)\n", name.c_str(), static_cast<double>(m),
                static_cast<double>(s / (count - 1)), count);
  }
  return 0;
}
