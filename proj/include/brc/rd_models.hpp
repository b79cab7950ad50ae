#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "brc/least_squares.hpp"

namespace brc {

/// One coding pass of one block: normalised lambda in (0, 1], rate in bpp, MSE distortion.
struct CodingSample {
  double lam = 1.0;
  double rate = 0.0;
  double distortion = 0.0;
};

enum class ModelKind { Rate, Distortion };

/// y = slope * ln(lambda) + intercept. Rate models need slope > 0, distortion models slope < 0.
struct LogLinearModel {
  double slope = 0.0;
  double intercept = 0.0;
  ModelKind kind = ModelKind::Rate;

  double raw(double lam) const;
  bool sign_valid() const { return kind == ModelKind::Rate ? slope > 0.0 : slope < 0.0; }
};

/// D = coeff * lambda^exponent, the power-law baseline.
struct PowerModel {
  double coeff = 1.0;
  double exponent = -1.0;

  double operator()(double lam) const;
};

enum class Provenance { Measured, Predicted };

struct BlockRdProfile {
  std::size_t block_index = 0;
  LogLinearModel rate_model{0.0, 0.0, ModelKind::Rate};
  LogLinearModel dist_model{0.0, 0.0, ModelKind::Distortion};
  Provenance provenance = Provenance::Measured;

  double a() const { return rate_model.slope; }
  double b() const { return rate_model.intercept; }
  double a_prime() const { return dist_model.slope; }
  double b_prime() const { return dist_model.intercept; }
};

/// Least-squares line of `values` on ln(lambda), no sign convention enforced.
/// Used for derivation checks where lambda is an unnormalised R-D slope.
Line<double> fit_log_line(std::span<const double> lambdas, std::span<const double> values);

LogLinearModel fit_two_point(const CodingSample& s1, const CodingSample& s2, ModelKind kind);
LogLinearModel fit_least_squares(std::span<const CodingSample> samples, ModelKind kind);
PowerModel fit_power(std::span<const CodingSample> samples);

/// Modelled bpp, clamped at 0.
double eval_rate(const LogLinearModel& m, double lam);
/// Modelled MSE, clamped at 0.
double eval_distortion(const LogLinearModel& m, double lam);

double fit_rmse(const LogLinearModel& m, std::span<const CodingSample> samples);
/// Power models only describe distortion, so they are scored against it.
double fit_rmse(const PowerModel& m, std::span<const CodingSample> samples);

/// Both log-linear models of a block from two coding passes.
BlockRdProfile measure_profile(std::size_t block_index, const CodingSample& s1, const CodingSample& s2);

}  // namespace brc
