#include "brc/block_grid.hpp"

#include <algorithm>
#include <string>

#include "brc/error.hpp"

namespace brc {

double average_gradient(const Block& block) { return average_gradient(block.pixels); }

std::vector<std::size_t> BlockGrid::pixel_counts() const {
  std::vector<std::size_t> counts;
  counts.reserve(blocks.size());
  for (const auto& b : blocks) counts.push_back(b.pixel_count());
  return counts;
}

BlockGrid partition(const Image& gray, int block_size) {
  if (block_size < kMinBlockSize)
    throw Error(Errc::BlockTooSmall, "block size " + std::to_string(block_size) + " is below " +
                                         std::to_string(kMinBlockSize));
  if (gray.channels != 1) throw Error(Errc::InvalidArgument, "partition expects a luma image");

  const Plane plane = to_plane(gray);
  BlockGrid grid;
  grid.image_width = gray.width;
  grid.image_height = gray.height;
  grid.block_size = block_size;
  grid.blocks.reserve(static_cast<std::size_t>(grid.blocks_x()) * grid.blocks_y());

  for (int y = 0; y < gray.height; y += block_size) {
    for (int x = 0; x < gray.width; x += block_size) {
      const int w = std::min(block_size, gray.width - x);
      const int h = std::min(block_size, gray.height - y);
      Block b;
      b.index = grid.blocks.size();
      b.origin_x = x;
      b.origin_y = y;
      b.pixels = plane.block(y, x, h, w);
      b.gradient = average_gradient(b.pixels);
      b.degenerate = w < 2 || h < 2;
      grid.blocks.push_back(std::move(b));
    }
  }
  return grid;
}

Plane assemble(const BlockGrid& grid, const std::vector<Plane>& planes) {
  if (planes.size() != grid.blocks.size()) throw Error(Errc::InvalidArgument, "plane count does not match grid");
  Plane out(grid.image_height, grid.image_width);
  for (std::size_t i = 0; i < planes.size(); ++i) {
    const Block& b = grid.blocks[i];
    if (planes[i].rows() != b.height() || planes[i].cols() != b.width())
      throw Error(Errc::InvalidArgument, "plane " + std::to_string(i) + " has the wrong size");
    out.block(b.origin_y, b.origin_x, b.height(), b.width()) = planes[i];
  }
  return out;
}

Plane assemble(const BlockGrid& grid) {
  std::vector<Plane> planes;
  planes.reserve(grid.blocks.size());
  for (const auto& b : grid.blocks) planes.push_back(b.pixels);
  return assemble(grid, planes);
}

}  // namespace brc
