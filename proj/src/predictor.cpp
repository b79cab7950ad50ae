#include "brc/predictor.hpp"

#include <algorithm>
#include <numeric>

#include <Eigen/Core>

#include "brc/error.hpp"
#include "brc/least_squares.hpp"

namespace brc {

const char* to_string(Coefficient c) noexcept {
  switch (c) {
    case Coefficient::A: return "a";
    case Coefficient::B: return "b";
    case Coefficient::APrime: return "a_prime";
    case Coefficient::BPrime: return "b_prime";
  }
  return "?";
}

bool SamplingPlan::contains(std::size_t index) const {
  return std::binary_search(sampled_indices.begin(), sampled_indices.end(), index);
}

std::size_t expected_sample_count(std::size_t blocks, int ratio_denominator) {
  if (blocks == 0) return 0;
  if (blocks == 1) return 1;
  const auto k = static_cast<std::size_t>(ratio_denominator);
  return std::max<std::size_t>(2, (blocks + k - 1) / k);
}

SamplingPlan select_samples(std::span<const double> gradients, int ratio_denominator) {
  if (ratio_denominator < 1) throw Error(Errc::InvalidArgument, "sampling ratio must be at least 1");
  SamplingPlan plan;
  plan.ratio_denominator = ratio_denominator;
  const std::size_t n = gradients.size();
  if (n == 0) return plan;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t l, std::size_t r) { return gradients[l] < gradients[r]; });

  const auto k = static_cast<std::size_t>(ratio_denominator);
  for (std::size_t rank = 0; rank < n; rank += k) plan.sampled_indices.push_back(order[rank]);
  if (n >= 2 && plan.sampled_indices.size() < 2) plan.sampled_indices.push_back(order.back());
  std::sort(plan.sampled_indices.begin(), plan.sampled_indices.end());
  return plan;
}

SamplingPlan select_samples(const BlockGrid& grid, int ratio_denominator) {
  std::vector<double> gradients;
  gradients.reserve(grid.blocks.size());
  for (const auto& b : grid.blocks) gradients.push_back(b.gradient);
  return select_samples(gradients, ratio_denominator);
}

double coefficient_of(const BlockRdProfile& p, Coefficient c) {
  switch (c) {
    case Coefficient::A: return p.a();
    case Coefficient::B: return p.b();
    case Coefficient::APrime: return p.a_prime();
    case Coefficient::BPrime: return p.b_prime();
  }
  return 0.0;
}

CoefficientLines fit_coefficient_lines(std::span<const MeasuredProfile> profiles) {
  if (profiles.size() < 2) throw Error(Errc::InsufficientSamples, "coefficient lines need two measured blocks");
  const auto n = static_cast<Eigen::Index>(profiles.size());
  Eigen::ArrayXd gradient(n);
  for (Eigen::Index i = 0; i < n; ++i) gradient(i) = profiles[static_cast<std::size_t>(i)].gradient;

  CoefficientLines lines;
  constexpr Coefficient targets[] = {Coefficient::A, Coefficient::B, Coefficient::APrime, Coefficient::BPrime};
  for (std::size_t t = 0; t < 4; ++t) {
    Eigen::ArrayXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) y(i) = coefficient_of(profiles[static_cast<std::size_t>(i)].profile, targets[t]);
    const Line<double> fit = fit_line(gradient, y);
    CoefficientLine& line = lines[t];
    line.target = targets[t];
    line.slope = fit.slope;
    line.intercept = fit.intercept;
    line.r_squared = fit.x_spread == 0.0 ? 0.0 : r_squared(fit, gradient, y);
  }
  return lines;
}

BlockRdProfile predict_profile(const CoefficientLines& lines, std::size_t block_index, double gradient) {
  BlockRdProfile p;
  p.block_index = block_index;
  p.provenance = Provenance::Predicted;
  p.rate_model = {std::max(lines[0](gradient), kCoefficientEpsilon), lines[1](gradient), ModelKind::Rate};
  p.dist_model = {std::min(lines[2](gradient), -kCoefficientEpsilon), lines[3](gradient), ModelKind::Distortion};
  return p;
}

BlockRdProfile predict_profile(const CoefficientLines& lines, const Block& block) {
  return predict_profile(lines, block.index, block.gradient);
}

}  // namespace brc
