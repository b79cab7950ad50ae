#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "brc/image.hpp"

namespace brc {

/// Average gradient of a sample plane: sqrt of the summed squared horizontal
/// and vertical neighbour differences, divided by the pixel count. Differences
/// that would reach past the last column/row are left out; the normaliser stays H*W.
/// Planes narrower or shorter than 2 samples report 0.
template <typename Derived>
double average_gradient(const Eigen::MatrixBase<Derived>& samples) {
  const Eigen::Index rows = samples.rows();
  const Eigen::Index cols = samples.cols();
  if (rows < 2 || cols < 2) return 0.0;
  const auto s = samples.template cast<double>();
  const double horizontal = (s.rightCols(cols - 1) - s.leftCols(cols - 1)).squaredNorm();
  const double vertical = (s.bottomRows(rows - 1) - s.topRows(rows - 1)).squaredNorm();
  return std::sqrt(horizontal + vertical) / static_cast<double>(rows * cols);
}

struct Block {
  std::size_t index = 0;
  int origin_x = 0;
  int origin_y = 0;
  Plane pixels;
  double gradient = 0.0;
  /// Set when one dimension is 1, so no differences exist in that direction.
  bool degenerate = false;

  int width() const { return static_cast<int>(pixels.cols()); }
  int height() const { return static_cast<int>(pixels.rows()); }
  std::size_t pixel_count() const { return static_cast<std::size_t>(pixels.size()); }
};

double average_gradient(const Block& block);

struct BlockGrid {
  std::vector<Block> blocks;
  int image_width = 0;
  int image_height = 0;
  int block_size = 0;

  int blocks_x() const { return (image_width + block_size - 1) / block_size; }
  int blocks_y() const { return (image_height + block_size - 1) / block_size; }
  std::size_t size() const { return blocks.size(); }
  std::vector<std::size_t> pixel_counts() const;
};

inline constexpr int kMinBlockSize = 8;

/// Raster-order tiling of a single-channel image; edge blocks keep their truncated size.
BlockGrid partition(const Image& gray, int block_size);

/// Stitches block planes back into a full plane. Inverse of partition.
Plane assemble(const BlockGrid& grid);
/// Same, with caller-supplied per-block planes (e.g. reconstructions).
Plane assemble(const BlockGrid& grid, const std::vector<Plane>& planes);

}  // namespace brc
