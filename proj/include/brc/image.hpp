#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include <Eigen/Core>

namespace brc {

/// Single-channel 8-bit sample plane, row-major so that it maps 1:1 onto PGM rasters.
using Plane = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

enum class PnmFormat { Pgm, Ppm };

/// Interleaved 8-bit raster with 1 (gray) or 3 (RGB) channels.
struct Image {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> data;

  Image() = default;
  Image(int w, int h, int ch);
  Image(int w, int h, int ch, std::vector<std::uint8_t> samples);

  std::uint8_t& at(int x, int y, int c = 0) {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  std::uint8_t at(int x, int y, int c = 0) const {
    return data[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
};

Image read_pnm(std::istream& in);
Image load_image(const std::filesystem::path& path);
/// Same as load_image but rejects files whose magic disagrees with `format`.
Image load_image(const std::filesystem::path& path, PnmFormat format);

void write_pnm(std::ostream& out, const Image& img);
void write_image(const std::filesystem::path& path, const Image& img);

/// BT.601 luma, rounded half-up. Identity for grayscale input.
Image to_luma(const Image& img);

Plane to_plane(const Image& gray);
Image from_plane(const Plane& plane);

double mse(const Plane& a, const Plane& b);
double psnr_from_mse(double mse);

}  // namespace brc
