#include "brc/rd_models.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Core>

#include "brc/error.hpp"
#include "brc/least_squares.hpp"

namespace brc {

namespace {

void check_lambda(double lam) {
  if (!(lam > 0.0 && lam <= 1.0)) throw Error(Errc::InvalidArgument, "lambda must lie in (0, 1]");
}

double dependent(const CodingSample& s, ModelKind kind) {
  return kind == ModelKind::Rate ? s.rate : s.distortion;
}

LogLinearModel checked(LogLinearModel m) {
  if (!std::isfinite(m.slope) || !std::isfinite(m.intercept))
    throw Error(Errc::DegenerateSamples, "non-finite model coefficients");
  if (!m.sign_valid())
    throw Error(Errc::NonMonotonicSamples, m.kind == ModelKind::Rate
                                               ? "rate does not increase with lambda"
                                               : "distortion does not decrease with lambda");
  return m;
}

Eigen::ArrayXd log_lambdas(std::span<const CodingSample> samples) {
  Eigen::ArrayXd x(static_cast<Eigen::Index>(samples.size()));
  for (std::size_t i = 0; i < samples.size(); ++i) {
    check_lambda(samples[i].lam);
    x(static_cast<Eigen::Index>(i)) = std::log(samples[i].lam);
  }
  return x;
}

}  // namespace

double LogLinearModel::raw(double lam) const { return slope * std::log(lam) + intercept; }

double PowerModel::operator()(double lam) const { return coeff * std::pow(lam, exponent); }

Line<double> fit_log_line(std::span<const double> lambdas, std::span<const double> values) {
  if (lambdas.size() != values.size() || lambdas.size() < 2)
    throw Error(Errc::DegenerateSamples, "log-line fit needs two or more paired values");
  Eigen::ArrayXd x(static_cast<Eigen::Index>(lambdas.size()));
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (!(lambdas[i] > 0.0)) throw Error(Errc::InvalidArgument, "lambda must be positive");
    x(static_cast<Eigen::Index>(i)) = std::log(lambdas[i]);
  }
  const Line<double> line = fit_line(x, Eigen::Map<const Eigen::ArrayXd>(values.data(), x.size()));
  if (line.x_spread == 0.0) throw Error(Errc::DegenerateSamples, "all samples share one lambda");
  return line;
}

LogLinearModel fit_two_point(const CodingSample& s1, const CodingSample& s2, ModelKind kind) {
  check_lambda(s1.lam);
  check_lambda(s2.lam);
  if (s1.lam == s2.lam) throw Error(Errc::DegenerateSamples, "two-point fit needs distinct lambdas");
  const double x1 = std::log(s1.lam), x2 = std::log(s2.lam);
  const double y1 = dependent(s1, kind), y2 = dependent(s2, kind);
  LogLinearModel m;
  m.kind = kind;
  m.slope = (y1 - y2) / (x1 - x2);
  m.intercept = y1 - m.slope * x1;
  return checked(m);
}

LogLinearModel fit_least_squares(std::span<const CodingSample> samples, ModelKind kind) {
  if (samples.size() < 2) throw Error(Errc::DegenerateSamples, "least squares needs at least two samples");
  const Eigen::ArrayXd x = log_lambdas(samples);
  Eigen::ArrayXd y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) y(i) = dependent(samples[static_cast<std::size_t>(i)], kind);
  const Line<double> line = fit_line(x, y);
  if (line.x_spread == 0.0) throw Error(Errc::DegenerateSamples, "all samples share one lambda");
  return checked({line.slope, line.intercept, kind});
}

PowerModel fit_power(std::span<const CodingSample> samples) {
  if (samples.size() < 2) throw Error(Errc::DegenerateSamples, "power fit needs at least two samples");
  const Eigen::ArrayXd x = log_lambdas(samples);
  Eigen::ArrayXd y(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double d = samples[static_cast<std::size_t>(i)].distortion;
    if (!(d > 0.0)) throw Error(Errc::NonPositiveDistortion, "power fit needs strictly positive distortion");
    y(i) = std::log(d);
  }
  const Line<double> line = fit_line(x, y);
  if (line.x_spread == 0.0) throw Error(Errc::DegenerateSamples, "all samples share one lambda");
  return {std::exp(line.intercept), line.slope};
}

double eval_rate(const LogLinearModel& m, double lam) { return std::max(0.0, m.raw(lam)); }

double eval_distortion(const LogLinearModel& m, double lam) { return std::max(0.0, m.raw(lam)); }

double fit_rmse(const LogLinearModel& m, std::span<const CodingSample> samples) {
  if (samples.empty()) throw Error(Errc::InvalidArgument, "rmse needs at least one sample");
  double sum = 0.0;
  for (const auto& s : samples) {
    const double e = std::max(0.0, m.raw(s.lam)) - dependent(s, m.kind);
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(samples.size()));
}

double fit_rmse(const PowerModel& m, std::span<const CodingSample> samples) {
  if (samples.empty()) throw Error(Errc::InvalidArgument, "rmse needs at least one sample");
  double sum = 0.0;
  for (const auto& s : samples) {
    const double e = m(s.lam) - s.distortion;
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(samples.size()));
}

BlockRdProfile measure_profile(std::size_t block_index, const CodingSample& s1, const CodingSample& s2) {
  BlockRdProfile p;
  p.block_index = block_index;
  p.rate_model = fit_two_point(s1, s2, ModelKind::Rate);
  p.dist_model = fit_two_point(s1, s2, ModelKind::Distortion);
  p.provenance = Provenance::Measured;
  return p;
}

}  // namespace brc
