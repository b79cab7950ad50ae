#include "brc/dct.hpp"

#include <algorithm>
#include <array>
#include <cstdlib>

#include "brc/error.hpp"
#include "brc/range_coder.hpp"

namespace brc {

namespace {

constexpr std::array<int, 64> kZigzag = {
    0,  1,  8,  16, 9,  2,  3,  10, 17, 24, 32, 25, 18, 11, 4,  5,  12, 19, 26, 33, 40, 48,
    41, 34, 27, 20, 13, 6,  7,  14, 21, 28, 35, 42, 49, 56, 57, 50, 43, 36, 29, 22, 15, 23,
    30, 37, 44, 51, 58, 59, 52, 45, 38, 31, 39, 46, 53, 60, 61, 54, 47, 55, 62, 63};

// Magnitudes of quantised levels: unary up to kUnaryCap, then kEscapeBits of residual.
// Level-shifted 8-bit input bounds orthonormal coefficients by 2048, so 11 bits suffice at qstep 1.
constexpr int kUnaryCap = 14;
constexpr int kEscapeBits = 11;
constexpr int kMaxLevel = kUnaryCap + (1 << kEscapeBits);

struct CoefficientContexts {
  std::array<BitModel, 64> significance{};
  BitModel sign{};
  std::array<std::array<BitModel, kUnaryCap>, 2> magnitude{};
  std::array<BitModel, kEscapeBits> escape{};
};

using Levels = Eigen::Matrix<int, 8, 8, Eigen::RowMajor>;

void encode_level(RangeEncoder& enc, CoefficientContexts& ctx, int zz, int level) {
  enc.encode(ctx.significance[zz], level != 0);
  if (level == 0) return;
  enc.encode(ctx.sign, level < 0);
  const int rest = std::abs(level) - 1;
  auto& unary = ctx.magnitude[zz == 0 ? 0 : 1];
  for (int i = 0; i < kUnaryCap; ++i) {
    const int more = rest > i;
    enc.encode(unary[i], more);
    if (!more) return;
  }
  const int residual = rest - kUnaryCap;
  for (int b = kEscapeBits - 1; b >= 0; --b) enc.encode(ctx.escape[b], (residual >> b) & 1);
}

int decode_level(RangeDecoder& dec, CoefficientContexts& ctx, int zz) {
  if (!dec.decode(ctx.significance[zz])) return 0;
  const bool negative = dec.decode(ctx.sign);
  auto& unary = ctx.magnitude[zz == 0 ? 0 : 1];
  int rest = 0;
  while (rest < kUnaryCap && dec.decode(unary[rest])) ++rest;
  if (rest == kUnaryCap) {
    int residual = 0;
    for (int b = kEscapeBits - 1; b >= 0; --b) residual |= dec.decode(ctx.escape[b]) << b;
    rest += residual;
  }
  const int magnitude = rest + 1;
  return negative ? -magnitude : magnitude;
}

// Shared by encoder and decoder so both produce identical samples.
Tile<double> reconstruct_tile(const Levels& levels, double qstep) {
  const Tile<double> spatial = inverse_dct(levels.cast<double>() * qstep);
  return (spatial.array() + 128.0).round().max(0.0).min(255.0).matrix();
}

void check_dims(int width, int height) {
  if (width < 1 || height < 1) throw Error(Errc::UnsupportedBlockSize, "empty block");
}

}  // namespace

double lambda_to_qstep(double lam) {
  if (!(lam > 0.0 && lam <= 1.0)) throw Error(Errc::InvalidArgument, "lambda must lie in (0, 1]");
  return std::exp2(6.0 * (1.0 - lam));
}

Plane pad_to_tiles(const Plane& pixels) {
  const Eigen::Index h = pixels.rows(), w = pixels.cols();
  const Eigen::Index ph = (h + 7) / 8 * 8, pw = (w + 7) / 8 * 8;
  Plane padded(ph, pw);
  for (Eigen::Index y = 0; y < ph; ++y)
    for (Eigen::Index x = 0; x < pw; ++x) padded(y, x) = pixels(std::min(y, h - 1), std::min(x, w - 1));
  return padded;
}

DctCoding dct_encode_block(const Plane& pixels, double qstep) {
  check_dims(static_cast<int>(pixels.cols()), static_cast<int>(pixels.rows()));
  if (!(qstep >= 1.0)) throw Error(Errc::InvalidArgument, "quantiser step must be at least 1");
  const Plane padded = pad_to_tiles(pixels);
  Plane recon(padded.rows(), padded.cols());

  RangeEncoder enc;
  CoefficientContexts ctx;
  for (Eigen::Index ty = 0; ty < padded.rows(); ty += 8) {
    for (Eigen::Index tx = 0; tx < padded.cols(); tx += 8) {
      const Tile<double> spatial = padded.block<8, 8>(ty, tx).cast<double>().array() - 128.0;
      const Tile<double> coefficients = forward_dct(spatial);
      Levels levels;
      for (int i = 0; i < 64; ++i) {
        const long q = std::lround(coefficients(i / 8, i % 8) / qstep);
        levels(i / 8, i % 8) = static_cast<int>(std::clamp<long>(q, -kMaxLevel, kMaxLevel));
      }
      for (int zz = 0; zz < 64; ++zz) encode_level(enc, ctx, zz, levels(kZigzag[zz] / 8, kZigzag[zz] % 8));
      recon.block<8, 8>(ty, tx) = reconstruct_tile(levels, qstep).cast<std::uint8_t>();
    }
  }
  return {enc.finish(), recon.topLeftCorner(pixels.rows(), pixels.cols())};
}

Plane dct_decode_block(std::span<const std::uint8_t> payload, int width, int height, double qstep) {
  check_dims(width, height);
  if (!(qstep >= 1.0)) throw Error(Errc::InvalidArgument, "quantiser step must be at least 1");
  const Eigen::Index ph = (height + 7) / 8 * 8, pw = (width + 7) / 8 * 8;
  Plane recon(ph, pw);

  RangeDecoder dec(payload);
  CoefficientContexts ctx;
  for (Eigen::Index ty = 0; ty < ph; ty += 8) {
    for (Eigen::Index tx = 0; tx < pw; tx += 8) {
      Levels levels;
      for (int zz = 0; zz < 64; ++zz) levels(kZigzag[zz] / 8, kZigzag[zz] % 8) = decode_level(dec, ctx, zz);
      recon.block<8, 8>(ty, tx) = reconstruct_tile(levels, qstep).cast<std::uint8_t>();
    }
  }
  dec.finish();
  return recon.topLeftCorner(height, width);
}

}  // namespace brc
