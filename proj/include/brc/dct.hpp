#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "brc/image.hpp"

namespace brc {

template <typename Scalar>
using Tile = Eigen::Matrix<Scalar, 8, 8, Eigen::RowMajor>;

/// Orthonormal type-II DCT basis; row k holds the k-th cosine.
template <typename Scalar>
const Tile<Scalar>& dct_matrix() {
  static const Tile<Scalar> basis = [] {
    Tile<Scalar> c;
    for (int k = 0; k < 8; ++k) {
      const Scalar scale = k == 0 ? std::sqrt(Scalar(1) / 8) : std::sqrt(Scalar(2) / 8);
      for (int n = 0; n < 8; ++n)
        c(k, n) = scale * std::cos(std::numbers::pi_v<Scalar> * (2 * n + 1) * k / Scalar(16));
    }
    return c;
  }();
  return basis;
}

template <typename Derived>
Tile<typename Derived::Scalar> forward_dct(const Eigen::MatrixBase<Derived>& tile) {
  const auto& c = dct_matrix<typename Derived::Scalar>();
  return c * tile * c.transpose();
}

template <typename Derived>
Tile<typename Derived::Scalar> inverse_dct(const Eigen::MatrixBase<Derived>& coefficients) {
  const auto& c = dct_matrix<typename Derived::Scalar>();
  return c.transpose() * coefficients * c;
}

/// Quantiser step for a normalised lambda: 64 * (1/64)^lambda, so 1 at lambda = 1
/// growing towards 64 as lambda approaches 0.
double lambda_to_qstep(double lam);

struct DctCoding {
  std::vector<std::uint8_t> payload;
  Plane reconstruction;
};

/// 8x8 tiles (edge-replicated to a multiple of 8), uniform quantisation, and a
/// context-adaptive binary range coder over the quantised levels in zigzag order.
DctCoding dct_encode_block(const Plane& pixels, double qstep);
Plane dct_decode_block(std::span<const std::uint8_t> payload, int width, int height, double qstep);

/// Edge-replicating pad to the next multiple of 8 in each dimension.
Plane pad_to_tiles(const Plane& pixels);

}  // namespace brc
