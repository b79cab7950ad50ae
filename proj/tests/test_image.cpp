#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <fstream>
#include <random>
#include <sstream>

#include "brc/error.hpp"
#include "brc/image.hpp"
#include "support/corpus.hpp"

using namespace brc;

namespace {

Image parse(const std::string& bytes) {
  std::istringstream in(bytes);
  return read_pnm(in);
}

Errc error_of(const std::string& bytes) {
  try {
    parse(bytes);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected an error");
  return Errc::Io;
}

}  // namespace

TEST_CASE("binary PGM maps bytes directly") {
  const Image img = parse(std::string("P5\n2 2\n255\n") + std::string("\x00\x0a\x00\x0a", 4));
  CHECK(img.width == 2);
  CHECK(img.height == 2);
  CHECK(img.channels == 1);
  CHECK(img.data == std::vector<std::uint8_t>{0, 10, 0, 10});
}

TEST_CASE("minimal 1x1 PGM") {
  const Image img = parse(std::string("P5 1 1 255\n") + "\xff");
  CHECK(img.width == 1);
  CHECK(img.data == std::vector<std::uint8_t>{255});
}

TEST_CASE("PPM reads three channels and header comments are skipped") {
  const Image img = parse(std::string("P6\n# comment\n1 1\n255\n") + "\x01\x02\x03");
  CHECK(img.channels == 3);
  CHECK(img.data == std::vector<std::uint8_t>{1, 2, 3});
}

TEST_CASE("header errors") {
  CHECK(error_of("P6\n1 1\n65535\n\x00\x00\x00\x00\x00\x00") == Errc::UnsupportedDepth);
  CHECK(error_of("P5\n2 2\n15\n\x00\x00\x00\x00") == Errc::UnsupportedDepth);
  CHECK(error_of("P2\n1 1\n255\n0") == Errc::MalformedHeader);
  CHECK(error_of("P5\n0 1\n255\n") == Errc::MalformedHeader);
  CHECK(error_of("P5\n2 2\n255\n\x01") == Errc::MalformedHeader);
  CHECK(error_of("P5\nx 2\n255\n") == Errc::MalformedHeader);
  CHECK(error_of("") == Errc::MalformedHeader);
}

TEST_CASE("missing file is an I/O error") {
  try {
    load_image("/nonexistent/definitely/missing.pgm");
    FAIL("expected error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Io);
  }
}

TEST_CASE("format-checked load rejects the other variant") {
  testing::TempDir dir("image");
  write_image(dir / "a.pgm", Image(3, 2, 1));
  CHECK_NOTHROW(load_image(dir / "a.pgm", PnmFormat::Pgm));
  CHECK_THROWS_AS(load_image(dir / "a.pgm", PnmFormat::Ppm), Error);
}

TEST_CASE("write then read reproduces random images") {
  std::mt19937_64 rng(7);
  testing::TempDir dir("image-rt");
  for (int trial = 0; trial < 20; ++trial) {
    const int w = 1 + static_cast<int>(rng() % 40), h = 1 + static_cast<int>(rng() % 40);
    const int ch = rng() % 2 ? 3 : 1;
    Image img(w, h, ch);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(rng());
    const auto path = dir / "rt.pnm";
    write_image(path, img);
    const Image back = load_image(path);
    CHECK(back.width == w);
    CHECK(back.height == h);
    CHECK(back.channels == ch);
    CHECK(back.data == img.data);
  }
}

TEST_CASE("luma conversion") {
  CHECK(to_luma(Image(1, 1, 1, {42})).data[0] == 42);
  CHECK(to_luma(Image(1, 1, 3, {255, 255, 255})).data[0] == 255);
  // round(0.299 * 255) = round(76.245)
  CHECK(to_luma(Image(1, 1, 3, {255, 0, 0})).data[0] == 76);
  CHECK(to_luma(Image(1, 1, 3, {0, 255, 0})).data[0] == 150);  // 149.685
  CHECK(to_luma(Image(1, 1, 3, {0, 0, 255})).data[0] == 29);   // 29.07
  CHECK(to_luma(Image(1, 1, 3, {0, 0, 0})).data[0] == 0);
}

TEST_CASE("luma matches the floating-point formula on random pixels") {
  std::mt19937_64 rng(11);
  Image rgb(64, 64, 3);
  for (auto& v : rgb.data) v = static_cast<std::uint8_t>(rng());
  const Image y = to_luma(rgb);
  for (std::size_t i = 0; i < y.data.size(); ++i) {
    const double ref = 0.299 * rgb.data[3 * i] + 0.587 * rgb.data[3 * i + 1] + 0.114 * rgb.data[3 * i + 2];
    CHECK(std::abs(y.data[i] - ref) <= 0.5 + 1e-9);
  }
}

TEST_CASE("image constructor validates") {
  CHECK_THROWS_AS(Image(0, 1, 1), Error);
  CHECK_THROWS_AS(Image(1, 1, 2), Error);
  CHECK_THROWS_AS(Image(2, 2, 1, {1, 2, 3}), Error);
}

TEST_CASE("psnr") {
  CHECK(std::isinf(psnr_from_mse(0.0)));
  CHECK(psnr_from_mse(255.0 * 255.0) == doctest::Approx(0.0));
  CHECK(psnr_from_mse(1.0) == doctest::Approx(48.1308).epsilon(1e-5));
}
