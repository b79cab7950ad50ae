#pragma once

#include <Eigen/Core>

namespace brc {

template <typename Scalar>
struct Line {
  Scalar slope{0};
  Scalar intercept{0};
  /// Sum of squared deviations of x from its mean; zero means the slope is unidentifiable.
  Scalar x_spread{0};
};

/// Ordinary least squares of y on x via centred sums. When x has no spread the
/// slope is 0 and the intercept is mean(y), the limit of the OLS solution.
template <typename DerivedX, typename DerivedY>
auto fit_line(const Eigen::DenseBase<DerivedX>& x, const Eigen::DenseBase<DerivedY>& y)
    -> Line<typename DerivedX::Scalar> {
  using Scalar = typename DerivedX::Scalar;
  const auto xa = x.derived().array().template cast<Scalar>();
  const auto ya = y.derived().array().template cast<Scalar>();
  const Scalar n = static_cast<Scalar>(xa.size());
  const Scalar mean_x = xa.sum() / n;
  const Scalar mean_y = ya.sum() / n;
  const auto dx = (xa - mean_x).eval();
  const Scalar sxx = dx.square().sum();
  Line<Scalar> line;
  line.x_spread = sxx;
  if (sxx == Scalar(0)) {
    line.intercept = mean_y;
    return line;
  }
  line.slope = (dx * (ya - mean_y)).sum() / sxx;
  line.intercept = mean_y - line.slope * mean_x;
  return line;
}

/// Coefficient of determination of `line` on (x, y); 1 when y is reproduced exactly.
template <typename Scalar, typename DerivedX, typename DerivedY>
Scalar r_squared(const Line<Scalar>& line, const Eigen::DenseBase<DerivedX>& x,
                 const Eigen::DenseBase<DerivedY>& y) {
  const auto xa = x.derived().array().template cast<Scalar>();
  const auto ya = y.derived().array().template cast<Scalar>();
  const Scalar ss_res = (ya - (line.slope * xa + line.intercept)).square().sum();
  if (ss_res == Scalar(0)) return Scalar(1);
  const Scalar ss_tot = (ya - ya.mean()).square().sum();
  if (ss_tot == Scalar(0)) return Scalar(0);
  const Scalar r2 = Scalar(1) - ss_res / ss_tot;
  return r2 < Scalar(0) ? Scalar(0) : (r2 > Scalar(1) ? Scalar(1) : r2);
}

}  // namespace brc
