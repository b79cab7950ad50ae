#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "brc/block_grid.hpp"
#include "brc/image.hpp"
#include "brc/rd_models.hpp"

namespace brc {

struct BackendDescriptor {
  std::string name;
  bool deterministic = true;
  /// False when rates are analytic and no payload is emitted.
  bool produces_bitstream = true;
  int min_block_dim = 1;
  int max_block_dim = 65535;
};

struct EncodeResult {
  std::vector<std::uint8_t> payload;
  std::uint64_t payload_bits = 0;
  double rate = 0.0;        ///< bits per pixel
  double distortion = 0.0;  ///< MSE against the source block
  Plane reconstruction;

  CodingSample sample(double lam) const { return {lam, rate, distortion}; }
};

/// A variable-rate block codec driven by a normalised lambda in (0, 1].
/// Implementations must tolerate concurrent encode/decode calls.
class CodecBackend {
 public:
  virtual ~CodecBackend() = default;

  virtual const BackendDescriptor& descriptor() const = 0;
  virtual EncodeResult encode(const Block& block, double lam) const = 0;
  virtual Plane decode(std::span<const std::uint8_t> payload, int width, int height, double lam) const = 0;
};

EncodeResult encode(const CodecBackend& backend, const Block& block, double lam);
Plane decode(const CodecBackend& backend, std::span<const std::uint8_t> payload, int width, int height, double lam);

struct AffineMap {
  double slope = 0.0;
  double intercept = 0.0;

  double operator()(double x) const { return slope * x + intercept; }
};

/// Ground truth for the analytic backend: each model coefficient is affine in the block gradient.
struct SyntheticSpec {
  AffineMap a_of_grad{1.5, 0.5};
  AffineMap b_of_grad{5.0, 4.0};
  AffineMap ap_of_grad{-40.0, -8.0};
  AffineMap bp_of_grad{10.0, 2.0};
  /// Relative noise: each reported value v becomes v * (1 + noise_amplitude * u), u ~ U[-1, 1].
  double noise_amplitude = 0.0;
  std::uint64_t seed = 0;

  BlockRdProfile profile_at(std::size_t block_index, double gradient) const;
};

/// Reports rate/distortion straight from SyntheticSpec. No payload; the
/// reconstruction is the source block and the distortion is analytic.
class SyntheticBackend final : public CodecBackend {
 public:
  explicit SyntheticBackend(SyntheticSpec spec);

  const BackendDescriptor& descriptor() const override { return descriptor_; }
  EncodeResult encode(const Block& block, double lam) const override;
  /// Always throws UnsupportedOperation: there is no bitstream to decode.
  Plane decode(std::span<const std::uint8_t> payload, int width, int height, double lam) const override;

  const SyntheticSpec& spec() const { return spec_; }

 private:
  SyntheticSpec spec_;
  BackendDescriptor descriptor_;
};

class DctBackend final : public CodecBackend {
 public:
  DctBackend();

  const BackendDescriptor& descriptor() const override { return descriptor_; }
  EncodeResult encode(const Block& block, double lam) const override;
  Plane decode(std::span<const std::uint8_t> payload, int width, int height, double lam) const override;

 private:
  BackendDescriptor descriptor_;
};

/// Forwards to another backend and counts encode invocations.
class CountingBackend final : public CodecBackend {
 public:
  explicit CountingBackend(const CodecBackend& inner) : inner_(inner) {}

  const BackendDescriptor& descriptor() const override { return inner_.descriptor(); }
  EncodeResult encode(const Block& block, double lam) const override {
    encodes_.fetch_add(1, std::memory_order_relaxed);
    return inner_.encode(block, lam);
  }
  Plane decode(std::span<const std::uint8_t> payload, int width, int height, double lam) const override {
    return inner_.decode(payload, width, height, lam);
  }

  std::size_t encode_calls() const { return encodes_.load(); }
  void reset() { encodes_.store(0); }

 private:
  const CodecBackend& inner_;
  mutable std::atomic<std::size_t> encodes_{0};
};

std::unique_ptr<CodecBackend> make_backend(const std::string& name, const SyntheticSpec& synthetic = {});

}  // namespace brc
