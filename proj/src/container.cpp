#include "brc/container.hpp"

#include <cmath>
#include <fstream>
#include <iterator>
#include <string>

#include "brc/error.hpp"

namespace brc {

namespace {

constexpr char kMagic[4] = {'B', 'R', 'C', '1'};

template <typename T>
void put_be(std::vector<std::uint8_t>& out, T value) {
  for (int shift = 8 * (static_cast<int>(sizeof(T)) - 1); shift >= 0; shift -= 8)
    out.push_back(static_cast<std::uint8_t>(value >> shift));
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : bytes_(bytes) {}

  template <typename T>
  T get_be() {
    need(sizeof(T));
    T value = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) value = static_cast<T>((value << 8) | bytes_[pos_++]);
    return value;
  }

  std::span<const std::uint8_t> take(std::size_t n) {
    need(n);
    auto s = bytes_.subspan(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw Error(Errc::MalformedContainer, "container truncated");
  }

  std::span<const std::uint8_t> bytes_;
  std::size_t pos_ = 0;
};

std::uint64_t expected_blocks(std::uint32_t w, std::uint32_t h, std::uint16_t bs) {
  return static_cast<std::uint64_t>((w + bs - 1) / bs) * ((h + bs - 1) / bs);
}

}  // namespace

double quantize_lambda(double lam) { return std::round(lam * kLambdaScale) / kLambdaScale; }

std::uint64_t Bitstream::total_payload_bits() const {
  std::uint64_t bits = 0;
  for (const auto& b : blocks) bits += b.payload_bits;
  return bits;
}

std::vector<std::uint8_t> serialize(const Bitstream& bs) {
  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put_be<std::uint32_t>(out, bs.width);
  put_be<std::uint32_t>(out, bs.height);
  put_be<std::uint16_t>(out, bs.block_size);
  put_be<std::uint32_t>(out, static_cast<std::uint32_t>(bs.blocks.size()));
  for (const auto& b : bs.blocks) {
    const double fixed = std::round(b.lam * kLambdaScale);
    if (!(fixed >= 1.0 && fixed <= kLambdaScale)) throw Error(Errc::InvalidArgument, "lambda outside (0, 1]");
    put_be<std::uint16_t>(out, static_cast<std::uint16_t>(fixed));
    put_be<std::uint32_t>(out, b.payload_bits);
    const std::size_t bytes = (static_cast<std::size_t>(b.payload_bits) + 7) / 8;
    if (b.payload.size() > bytes) throw Error(Errc::InvalidArgument, "payload longer than its bit length");
    out.insert(out.end(), b.payload.begin(), b.payload.end());
    out.insert(out.end(), bytes - b.payload.size(), 0);
  }
  return out;
}

Bitstream parse_bitstream(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const auto magic = r.take(4);
  if (!std::equal(magic.begin(), magic.end(), std::begin(kMagic))) throw Error(Errc::MalformedContainer, "bad magic");
  Bitstream bs;
  bs.width = r.get_be<std::uint32_t>();
  bs.height = r.get_be<std::uint32_t>();
  bs.block_size = r.get_be<std::uint16_t>();
  const auto count = r.get_be<std::uint32_t>();
  if (bs.width == 0 || bs.height == 0) throw Error(Errc::MalformedContainer, "zero image dimension");
  if (bs.block_size < 8) throw Error(Errc::MalformedContainer, "block size below 8");
  if (count != expected_blocks(bs.width, bs.height, bs.block_size))
    throw Error(Errc::MalformedContainer, "block count " + std::to_string(count) + " does not tile the image");
  bs.blocks.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    ContainerBlock b;
    const auto fixed = r.get_be<std::uint16_t>();
    if (fixed == 0 || fixed > kLambdaScale) throw Error(Errc::MalformedContainer, "lambda outside (0, 1]");
    b.lam = fixed / kLambdaScale;
    b.payload_bits = r.get_be<std::uint32_t>();
    const auto payload = r.take((static_cast<std::size_t>(b.payload_bits) + 7) / 8);
    b.payload.assign(payload.begin(), payload.end());
    bs.blocks.push_back(std::move(b));
  }
  if (!r.done()) throw Error(Errc::MalformedContainer, "trailing bytes after last block");
  return bs;
}

void write_bitstream(const std::filesystem::path& path, const Bitstream& bs) {
  const auto bytes = serialize(bs);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::Io, "cannot create " + path.string());
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(Errc::Io, "write failed for " + path.string());
}

Bitstream read_bitstream(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::Io, "cannot open " + path.string());
  const std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_bitstream(bytes);
}

}  // namespace brc
