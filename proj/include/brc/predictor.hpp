#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "brc/block_grid.hpp"
#include "brc/rd_models.hpp"

namespace brc {

enum class Coefficient { A, B, APrime, BPrime };

const char* to_string(Coefficient c) noexcept;

/// Affine map from block gradient to one model coefficient.
struct CoefficientLine {
  Coefficient target = Coefficient::A;
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;

  double operator()(double gradient) const { return slope * gradient + intercept; }
};

using CoefficientLines = std::array<CoefficientLine, 4>;

struct SamplingPlan {
  int ratio_denominator = 1;
  /// Ascending block ordinals.
  std::vector<std::size_t> sampled_indices;

  bool contains(std::size_t index) const;
};

/// Blocks ranked by (gradient, index); every k-th rank is measured. At least two
/// blocks are taken whenever two exist, the second being the steepest one.
SamplingPlan select_samples(const BlockGrid& grid, int ratio_denominator);
SamplingPlan select_samples(std::span<const double> gradients, int ratio_denominator);

std::size_t expected_sample_count(std::size_t blocks, int ratio_denominator);

struct MeasuredProfile {
  double gradient = 0.0;
  BlockRdProfile profile;
};

CoefficientLines fit_coefficient_lines(std::span<const MeasuredProfile> profiles);

inline constexpr double kCoefficientEpsilon = 1e-6;

BlockRdProfile predict_profile(const CoefficientLines& lines, const Block& block);
BlockRdProfile predict_profile(const CoefficientLines& lines, std::size_t block_index, double gradient);

double coefficient_of(const BlockRdProfile& p, Coefficient c);

}  // namespace brc
