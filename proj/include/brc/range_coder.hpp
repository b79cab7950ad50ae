#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace brc {

/// Adaptive probability of a zero bit, 11-bit fixed point.
struct BitModel {
  static constexpr int kBits = 11;
  static constexpr std::uint32_t kOne = 1u << kBits;
  static constexpr int kAdaptShift = 5;

  std::uint16_t p0 = kOne / 2;
};

/// Carry-propagating binary range encoder. Output length in bytes equals the
/// number of renormalisations plus five, which the decoder relies on to detect truncation.
class RangeEncoder {
 public:
  void encode(BitModel& model, int bit);
  /// Equiprobable bit without a context.
  void encode_direct(int bit);
  std::vector<std::uint8_t> finish();

 private:
  void shift_low();

  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint8_t cache_ = 0;
  std::uint64_t cache_size_ = 1;
  std::vector<std::uint8_t> out_;
};

class RangeDecoder {
 public:
  /// Throws CorruptPayload if the stream is shorter than the five-byte preamble.
  explicit RangeDecoder(std::span<const std::uint8_t> payload);

  int decode(BitModel& model);
  int decode_direct();
  /// Throws CorruptPayload unless every payload byte has been consumed.
  void finish() const;

 private:
  std::uint8_t next_byte();
  void normalize();

  std::span<const std::uint8_t> in_;
  std::size_t pos_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint32_t code_ = 0;
};

}  // namespace brc
