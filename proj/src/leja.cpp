#include "lejapce/leja.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

#include "lejapce/errors.hpp"

namespace lejapce {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();
// Grid cells whose value is this close to the best one get polished.
constexpr double kCandidateSlack = 1e-3;
constexpr double kTieTol = 1e-12;
constexpr double kGoldenTol = 1e-12;

double grid_point(std::size_t i) {
  return -1.0 + 2.0 * static_cast<double>(i) / static_cast<double>(kLejaGridPoints - 1);
}

}  // namespace

double initial_node(const Distribution& dist) { return dist.median(); }

LejaSequence::LejaSequence(Distribution dist) : dist_(std::move(dist)) {
  const Interval support = dist_.effective_support();
  lo_ = support.lo;
  hi_ = support.hi;
  center_ = 0.5 * (support.lo + support.hi);
  half_ = 0.5 * support.width();
  const double y0 = initial_node(dist_);
  nodes_.push_back(y0);
  scaled_.push_back((y0 - center_) / half_);
}

// Scaled coordinate back to y; the ends of [-1, 1] hit the support bounds exactly.
double LejaSequence::unscale(double z) const {
  if (z <= -1.0) return lo_;
  if (z >= 1.0) return hi_;
  return std::clamp(center_ + half_ * z, lo_, hi_);
}

double LejaSequence::scaled_objective(double z) const {
  double value = 0.5 * dist_.log_pdf(unscale(z));
  for (double zk : scaled_) value += std::log(std::abs(z - zk));
  return value;
}

double LejaSequence::log_objective(double y, std::size_t prefix) const {
  double value = 0.5 * dist_.log_pdf(y);
  for (std::size_t k = 0; k < prefix && k < nodes_.size(); ++k) value += std::log(std::abs(y - nodes_[k]));
  return value;
}

void LejaSequence::ensure_grid() {
  if (grid_objective_.empty()) {
    grid_objective_.resize(kLejaGridPoints);
    for (std::size_t i = 0; i < kLejaGridPoints; ++i)
      grid_objective_[i] = 0.5 * dist_.log_pdf(unscale(grid_point(i)));
    grid_terms_ = 0;
  }
  for (; grid_terms_ < scaled_.size(); ++grid_terms_) {
    const double zk = scaled_[grid_terms_];
    for (std::size_t i = 0; i < kLejaGridPoints; ++i) grid_objective_[i] += std::log(std::abs(grid_point(i) - zk));
  }
}

void LejaSequence::append_next() {
  ensure_grid();
  const auto& g = grid_objective_;
  double best = kNegInf;
  for (double v : g)
    if (v > best) best = v;
  if (!std::isfinite(best))
    throw NumericalError("Leja objective vanishes on the whole search grid for " + dist_.describe());

  double chosen_z = 0.0;
  double chosen_value = kNegInf;
  const std::size_t last = kLejaGridPoints - 1;
  for (std::size_t i = 0; i <= last; ++i) {
    if (!(g[i] >= best - kCandidateSlack)) continue;
    if ((i > 0 && g[i - 1] > g[i]) || (i < last && g[i + 1] > g[i])) continue;

    // Golden-section polish inside the neighbouring cells.
    double a = grid_point(i > 0 ? i - 1 : 0);
    double b = grid_point(i < last ? i + 1 : last);
    const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = scaled_objective(c);
    double fd = scaled_objective(d);
    while (b - a > kGoldenTol) {
      if (fc >= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - inv_phi * (b - a);
        fc = scaled_objective(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + inv_phi * (b - a);
        fd = scaled_objective(d);
      }
    }
    double z = fc >= fd ? c : d;
    double value = std::max(fc, fd);
    const double at_grid = scaled_objective(grid_point(i));
    if (!(value > at_grid)) {
      z = grid_point(i);
      value = at_grid;
    }

    if (value > chosen_value + kTieTol || (std::abs(value - chosen_value) <= kTieTol && z < chosen_z)) {
      // Keep the larger value on a tie so later ties compare against it.
      if (std::abs(value - chosen_value) <= kTieTol) value = std::max(value, chosen_value);
      chosen_z = z;
      chosen_value = value;
    }
  }
  if (!std::isfinite(chosen_value))
    throw NumericalError("Leja optimization failed for " + dist_.describe());
  scaled_.push_back(chosen_z);
  nodes_.push_back(unscale(chosen_z));
}

void LejaSequence::extend(std::size_t new_length) {
  if (new_length < nodes_.size()) throw ContractViolation("Leja sequences cannot shrink");
  while (nodes_.size() < new_length) append_next();
}

LejaSequence extend(LejaSequence seq, std::size_t new_length) {
  seq.extend(new_length);
  return seq;
}

std::vector<double> cached_leja_nodes(const Distribution& dist, std::size_t count) {
  static std::mutex mutex;
  static std::map<std::pair<int, std::vector<double>>, LejaSequence> cache;
  const auto key = std::make_pair(static_cast<int>(dist.kind()), dist.parameters());
  std::lock_guard lock(mutex);
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, LejaSequence(dist)).first;
  if (it->second.size() < count) it->second.extend(count);
  const auto& nodes = it->second.nodes();
  return {nodes.begin(), nodes.begin() + static_cast<std::ptrdiff_t>(count)};
}

}  // namespace lejapce
