#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace brc {

/// Lambdas travel as 16-bit fixed point with four decimals; encoders should code
/// with the quantised value so decoders see exactly the same quantiser.
inline constexpr double kLambdaScale = 10000.0;

double quantize_lambda(double lam);

struct ContainerBlock {
  double lam = 1.0;
  std::uint32_t payload_bits = 0;
  std::vector<std::uint8_t> payload;
};

/// Layout (all integers big-endian):
///   "BRC1" | width u32 | height u32 | block_size u16 | block_count u32 |
///   per block: lambda u16 (value * 10000) | payload bit length u32 | payload bytes, zero-padded.
struct Bitstream {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::uint16_t block_size = 0;
  std::vector<ContainerBlock> blocks;

  std::uint64_t total_payload_bits() const;
};

std::vector<std::uint8_t> serialize(const Bitstream& bs);
/// Throws MalformedContainer on any structural problem (magic, dims, counts, truncation, trailing data).
Bitstream parse_bitstream(std::span<const std::uint8_t> bytes);

void write_bitstream(const std::filesystem::path& path, const Bitstream& bs);
Bitstream read_bitstream(const std::filesystem::path& path);

}  // namespace brc
