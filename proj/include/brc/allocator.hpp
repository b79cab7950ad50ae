#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "brc/rd_models.hpp"

namespace brc {

struct RateControlConfig {
  double lambda_init = 0.6;
  double lambda_step = 0.01;
  double lambda_min = 0.05;
  double target_bpp = 0.0;

  /// Throws InvalidArgument unless 0 < step <= min < init <= 1 and target >= 0.
  void validate() const;
  /// Largest number of steps a block may take before reaching the floor.
  int max_steps() const;
  double lambda_after(int steps) const { return lambda_init - steps * lambda_step; }
};

enum class AllocationOutcome { Success, TargetUnreachable };

struct AllocationState {
  std::vector<double> lambdas;
  std::vector<double> rates;
  std::vector<std::size_t> pixel_counts;
  std::vector<int> steps;
  std::vector<bool> frozen;
  double total_bpp = 0.0;
  std::size_t iterations = 0;
  /// Block chosen at each iteration, in order.
  std::vector<std::size_t> selections;
  AllocationOutcome outcome = AllocationOutcome::Success;
};

/// Distortion increase from lowering lambda by one step: -a' * ln(lam / (lam - step)).
double distortion_cost(const BlockRdProfile& profile, double lam, double step);

AllocationState allocate(std::span<const BlockRdProfile> profiles, std::span<const std::size_t> pixel_counts,
                         const RateControlConfig& cfg);

struct ModeledTotals {
  double bpp = 0.0;
  double distortion = 0.0;
};

/// Pixel-weighted mean modelled rate and distortion at the state's lambdas.
ModeledTotals modeled_totals(const AllocationState& state, std::span<const BlockRdProfile> profiles);
ModeledTotals modeled_totals(std::span<const double> lambdas, std::span<const std::size_t> pixel_counts,
                             std::span<const BlockRdProfile> profiles);

}  // namespace brc
