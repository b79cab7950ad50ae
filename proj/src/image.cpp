#include "brc/image.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <string>

#include "brc/error.hpp"

namespace brc {

Image::Image(int w, int h, int ch) : Image(w, h, ch, std::vector<std::uint8_t>(static_cast<std::size_t>(w) * h * ch)) {}

Image::Image(int w, int h, int ch, std::vector<std::uint8_t> samples)
    : width(w), height(h), channels(ch), data(std::move(samples)) {
  if (w < 1 || h < 1) throw Error(Errc::InvalidArgument, "image dimensions must be positive");
  if (ch != 1 && ch != 3) throw Error(Errc::InvalidArgument, "channels must be 1 or 3");
  if (data.size() != static_cast<std::size_t>(w) * h * ch)
    throw Error(Errc::InvalidArgument, "sample count does not match dimensions");
}

namespace {

// Header tokens may be separated by arbitrary whitespace and '#' comments;
// the raster starts after exactly one whitespace byte following maxval.
long read_header_int(std::istream& in) {
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = in.get();
  }
  if (c == EOF || !std::isdigit(c)) throw Error(Errc::MalformedHeader, "expected a decimal header field");
  long value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    if (value > std::numeric_limits<int>::max()) throw Error(Errc::MalformedHeader, "header field overflow");
    c = in.get();
  }
  if (c == EOF || !std::isspace(c)) throw Error(Errc::MalformedHeader, "header field not followed by whitespace");
  return value;
}

}  // namespace

Image read_pnm(std::istream& in) {
  char magic[2] = {};
  if (!in.read(magic, 2)) throw Error(Errc::MalformedHeader, "missing magic");
  int channels = 0;
  if (magic[0] == 'P' && magic[1] == '5') channels = 1;
  else if (magic[0] == 'P' && magic[1] == '6') channels = 3;
  else throw Error(Errc::MalformedHeader, "expected P5 or P6 magic");

  const long width = read_header_int(in);
  const long height = read_header_int(in);
  const long maxval = read_header_int(in);
  if (width < 1 || height < 1) throw Error(Errc::MalformedHeader, "zero image dimension");
  if (maxval < 1 || maxval > 65535) throw Error(Errc::MalformedHeader, "maxval out of range");
  if (maxval != 255) throw Error(Errc::UnsupportedDepth, "only maxval 255 is supported");

  std::vector<std::uint8_t> data(static_cast<std::size_t>(width) * height * channels);
  in.read(reinterpret_cast<char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (static_cast<std::size_t>(in.gcount()) != data.size()) throw Error(Errc::MalformedHeader, "truncated raster");
  return Image(static_cast<int>(width), static_cast<int>(height), channels, std::move(data));
}

Image load_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  return read_pnm(in);
}

Image load_image(const std::filesystem::path& path, PnmFormat format) {
  Image img = load_image(path);
  const int expected = format == PnmFormat::Pgm ? 1 : 3;
  if (img.channels != expected) throw Error(Errc::MalformedHeader, "unexpected PNM variant in " + path.string());
  return img;
}

void write_pnm(std::ostream& out, const Image& img) {
  out << (img.channels == 1 ? "P5" : "P6") << '\n' << img.width << ' ' << img.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(img.data.data()), static_cast<std::streamsize>(img.data.size()));
}

void write_image(const std::filesystem::path& path, const Image& img) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot create " + path.string());
  write_pnm(out, img);
  if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

Image to_luma(const Image& img) {
  if (img.channels == 1) return img;
  if (img.channels != 3) throw Error(Errc::InvalidArgument, "channels must be 1 or 3");
  Image out(img.width, img.height, 1);
  const std::size_t n = static_cast<std::size_t>(img.width) * img.height;
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned r = img.data[3 * i], g = img.data[3 * i + 1], b = img.data[3 * i + 2];
    // Integer weights in thousandths: exact half-up rounding of 0.299R + 0.587G + 0.114B.
    const unsigned y = (299 * r + 587 * g + 114 * b + 500) / 1000;
    out.data[i] = static_cast<std::uint8_t>(std::min(y, 255u));
  }
  return out;
}

Plane to_plane(const Image& gray) {
  if (gray.channels != 1) throw Error(Errc::InvalidArgument, "plane conversion needs a single-channel image");
  return Eigen::Map<const Plane>(gray.data.data(), gray.height, gray.width);
}

Image from_plane(const Plane& plane) {
  Image img(static_cast<int>(plane.cols()), static_cast<int>(plane.rows()), 1);
  Eigen::Map<Plane>(img.data.data(), plane.rows(), plane.cols()) = plane;
  return img;
}

double mse(const Plane& a, const Plane& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) throw Error(Errc::InvalidArgument, "plane size mismatch");
  if (a.size() == 0) return 0.0;
  return (a.cast<double>() - b.cast<double>()).squaredNorm() / static_cast<double>(a.size());
}

double psnr_from_mse(double mse) {
  if (mse <= 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

}  // namespace brc
