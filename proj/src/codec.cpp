#include "brc/codec.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "brc/dct.hpp"
#include "brc/error.hpp"

namespace brc {

namespace {

void check_lambda(double lam) {
  if (!(lam > 0.0 && lam <= 1.0)) throw Error(Errc::InvalidArgument, "lambda must lie in (0, 1]");
}

void check_block(const BackendDescriptor& d, int width, int height) {
  if (width < d.min_block_dim || height < d.min_block_dim || width > d.max_block_dim || height > d.max_block_dim)
    throw Error(Errc::UnsupportedBlockSize, d.name + " cannot code a " + std::to_string(width) + "x" +
                                                std::to_string(height) + " block");
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

// Uniform in [-1, 1], a pure function of its key.
double unit_noise(std::uint64_t key) { return static_cast<double>(splitmix64(key) >> 11) * 0x1.0p-52 - 1.0; }

}  // namespace

EncodeResult encode(const CodecBackend& backend, const Block& block, double lam) { return backend.encode(block, lam); }

Plane decode(const CodecBackend& backend, std::span<const std::uint8_t> payload, int width, int height, double lam) {
  return backend.decode(payload, width, height, lam);
}

BlockRdProfile SyntheticSpec::profile_at(std::size_t block_index, double gradient) const {
  BlockRdProfile p;
  p.block_index = block_index;
  p.rate_model = {a_of_grad(gradient), b_of_grad(gradient), ModelKind::Rate};
  p.dist_model = {ap_of_grad(gradient), bp_of_grad(gradient), ModelKind::Distortion};
  p.provenance = Provenance::Measured;
  return p;
}

SyntheticBackend::SyntheticBackend(SyntheticSpec spec) : spec_(spec) {
  if (!(spec_.noise_amplitude >= 0.0 && spec_.noise_amplitude < 1.0))
    throw Error(Errc::InvalidArgument, "noise amplitude must lie in [0, 1)");
  descriptor_.name = "synthetic";
  descriptor_.deterministic = true;
  descriptor_.produces_bitstream = false;
}

EncodeResult SyntheticBackend::encode(const Block& block, double lam) const {
  check_lambda(lam);
  check_block(descriptor_, block.width(), block.height());
  const BlockRdProfile truth = spec_.profile_at(block.index, block.gradient);
  EncodeResult r;
  r.rate = eval_rate(truth.rate_model, lam);
  r.distortion = eval_distortion(truth.dist_model, lam);
  if (spec_.noise_amplitude > 0.0) {
    const std::uint64_t key = splitmix64(spec_.seed) ^ splitmix64(block.index * 0x100000001B3ull) ^
                              std::bit_cast<std::uint64_t>(lam);
    r.rate *= 1.0 + spec_.noise_amplitude * unit_noise(key);
    r.distortion *= 1.0 + spec_.noise_amplitude * unit_noise(key ^ 0xD1B54A32D192ED03ull);
  }
  r.reconstruction = block.pixels;
  return r;
}

Plane SyntheticBackend::decode(std::span<const std::uint8_t>, int, int, double) const {
  throw Error(Errc::UnsupportedOperation, "the synthetic backend emits no bitstream");
}

DctBackend::DctBackend() { descriptor_.name = "dct"; }

EncodeResult DctBackend::encode(const Block& block, double lam) const {
  check_lambda(lam);
  check_block(descriptor_, block.width(), block.height());
  DctCoding coded = dct_encode_block(block.pixels, lambda_to_qstep(lam));
  EncodeResult r;
  r.payload = std::move(coded.payload);
  r.payload_bits = static_cast<std::uint64_t>(r.payload.size()) * 8;
  r.rate = static_cast<double>(r.payload_bits) / static_cast<double>(block.pixel_count());
  r.distortion = mse(block.pixels, coded.reconstruction);
  r.reconstruction = std::move(coded.reconstruction);
  return r;
}

Plane DctBackend::decode(std::span<const std::uint8_t> payload, int width, int height, double lam) const {
  check_lambda(lam);
  check_block(descriptor_, width, height);
  if (payload.empty()) throw Error(Errc::CorruptPayload, "empty payload for a non-empty block");
  return dct_decode_block(payload, width, height, lambda_to_qstep(lam));
}

std::unique_ptr<CodecBackend> make_backend(const std::string& name, const SyntheticSpec& synthetic) {
  if (name == "dct") return std::make_unique<DctBackend>();
  if (name == "synthetic") return std::make_unique<SyntheticBackend>(synthetic);
  throw Error(Errc::InvalidArgument, "unknown backend '" + name + "'");
}

}  // namespace brc
