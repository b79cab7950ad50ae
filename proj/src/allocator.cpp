#include "brc/allocator.hpp"

#include <cmath>
#include <set>
#include <utility>

#include "brc/error.hpp"

namespace brc {

void RateControlConfig::validate() const {
  if (!(lambda_init > 0.0 && lambda_init <= 1.0)) throw Error(Errc::InvalidArgument, "lambda_init must lie in (0, 1]");
  if (!(lambda_step > 0.0)) throw Error(Errc::InvalidArgument, "lambda_step must be positive");
  if (!(lambda_min > 0.0 && lambda_min < lambda_init))
    throw Error(Errc::InvalidArgument, "lambda_min must lie in (0, lambda_init)");
  if (lambda_min < lambda_step) throw Error(Errc::InvalidArgument, "lambda_min must be at least lambda_step");
  if (!(target_bpp >= 0.0)) throw Error(Errc::InvalidArgument, "target bpp must be nonnegative");
}

int RateControlConfig::max_steps() const {
  // The epsilon absorbs representation error in e.g. (0.6 - 0.05) / 0.01.
  return static_cast<int>(std::floor((lambda_init - lambda_min) / lambda_step + 1e-9));
}

double distortion_cost(const BlockRdProfile& profile, double lam, double step) {
  if (!(lam - step > 0.0)) throw Error(Errc::StepUnderflow, "lambda step would reach zero");
  return -profile.a_prime() * std::log(lam / (lam - step));
}

AllocationState allocate(std::span<const BlockRdProfile> profiles, std::span<const std::size_t> pixel_counts,
                         const RateControlConfig& cfg) {
  cfg.validate();
  if (profiles.size() != pixel_counts.size()) throw Error(Errc::InvalidArgument, "profiles and pixel counts differ in length");
  for (const auto& p : profiles)
    if (!p.rate_model.sign_valid() || !p.dist_model.sign_valid())
      throw Error(Errc::InvalidArgument, "profile violates coefficient sign invariants");

  const std::size_t n = profiles.size();
  AllocationState s;
  s.lambdas.assign(n, cfg.lambda_init);
  s.rates.resize(n);
  s.pixel_counts.assign(pixel_counts.begin(), pixel_counts.end());
  s.steps.assign(n, 0);
  s.frozen.assign(n, false);

  double total_pixels = 0.0;
  for (auto c : pixel_counts) total_pixels += static_cast<double>(c);
  if (n == 0 || total_pixels == 0.0) return s;

  double weighted = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    s.rates[i] = eval_rate(profiles[i].rate_model, cfg.lambda_init);
    weighted += s.rates[i] * static_cast<double>(pixel_counts[i]);
  }
  s.total_bpp = weighted / total_pixels;

  // Each block's next-step cost depends only on its own lambda, so an ordered set
  // keyed by (cost, index) yields the argmin with lowest-index tie-breaking.
  const int max_steps = cfg.max_steps();
  std::set<std::pair<double, std::size_t>> queue;
  auto enqueue = [&](std::size_t i) {
    if (s.steps[i] >= max_steps) {
      s.frozen[i] = true;
      return;
    }
    queue.emplace(distortion_cost(profiles[i], s.lambdas[i], cfg.lambda_step), i);
  };
  for (std::size_t i = 0; i < n; ++i) enqueue(i);

  while (s.total_bpp > cfg.target_bpp && !queue.empty()) {
    const std::size_t i = queue.begin()->second;
    queue.erase(queue.begin());
    ++s.steps[i];
    s.lambdas[i] = cfg.lambda_after(s.steps[i]);
    const double rate = eval_rate(profiles[i].rate_model, s.lambdas[i]);
    s.total_bpp += (rate - s.rates[i]) * static_cast<double>(pixel_counts[i]) / total_pixels;
    s.rates[i] = rate;
    s.selections.push_back(i);
    ++s.iterations;
    enqueue(i);
  }
  s.outcome = s.total_bpp > cfg.target_bpp ? AllocationOutcome::TargetUnreachable : AllocationOutcome::Success;
  return s;
}

ModeledTotals modeled_totals(std::span<const double> lambdas, std::span<const std::size_t> pixel_counts,
                             std::span<const BlockRdProfile> profiles) {
  if (lambdas.size() != profiles.size() || pixel_counts.size() != profiles.size())
    throw Error(Errc::InvalidArgument, "state and profiles are not index-aligned");
  double pixels = 0.0, rate = 0.0, dist = 0.0;
  for (std::size_t i = 0; i < profiles.size(); ++i) {
    const double w = static_cast<double>(pixel_counts[i]);
    pixels += w;
    rate += eval_rate(profiles[i].rate_model, lambdas[i]) * w;
    dist += eval_distortion(profiles[i].dist_model, lambdas[i]) * w;
  }
  if (pixels == 0.0) return {};
  return {rate / pixels, dist / pixels};
}

ModeledTotals modeled_totals(const AllocationState& state, std::span<const BlockRdProfile> profiles) {
  return modeled_totals(state.lambdas, state.pixel_counts, profiles);
}

}  // namespace brc
