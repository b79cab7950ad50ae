#include "brc/range_coder.hpp"

#include "brc/error.hpp"

namespace brc {

namespace {
constexpr std::uint32_t kTop = 1u << 24;
}

void RangeEncoder::shift_low() {
  if (static_cast<std::uint32_t>(low_) < 0xFF000000u || (low_ >> 32) != 0) {
    const auto carry = static_cast<std::uint8_t>(low_ >> 32);
    std::uint8_t pending = cache_;
    do {
      out_.push_back(static_cast<std::uint8_t>(pending + carry));
      pending = 0xFF;
    } while (--cache_size_ != 0);
    cache_ = static_cast<std::uint8_t>(low_ >> 24);
  }
  ++cache_size_;
  low_ = (low_ & 0x00FFFFFFu) << 8;
}

void RangeEncoder::encode(BitModel& model, int bit) {
  const std::uint32_t bound = (range_ >> BitModel::kBits) * model.p0;
  if (bit == 0) {
    range_ = bound;
    model.p0 = static_cast<std::uint16_t>(model.p0 + ((BitModel::kOne - model.p0) >> BitModel::kAdaptShift));
  } else {
    low_ += bound;
    range_ -= bound;
    model.p0 = static_cast<std::uint16_t>(model.p0 - (model.p0 >> BitModel::kAdaptShift));
  }
  while (range_ < kTop) {
    range_ <<= 8;
    shift_low();
  }
}

void RangeEncoder::encode_direct(int bit) {
  range_ >>= 1;
  if (bit != 0) low_ += range_;
  while (range_ < kTop) {
    range_ <<= 8;
    shift_low();
  }
}

std::vector<std::uint8_t> RangeEncoder::finish() {
  for (int i = 0; i < 5; ++i) shift_low();
  return std::move(out_);
}

RangeDecoder::RangeDecoder(std::span<const std::uint8_t> payload) : in_(payload) {
  if (in_.size() < 5) throw Error(Errc::CorruptPayload, "range-coded payload shorter than its preamble");
  if (next_byte() != 0) throw Error(Errc::CorruptPayload, "range coder preamble must start with a zero byte");
  for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next_byte();
  if (code_ == range_) throw Error(Errc::CorruptPayload, "range coder state out of bounds");
}

std::uint8_t RangeDecoder::next_byte() {
  if (pos_ >= in_.size()) throw Error(Errc::CorruptPayload, "range-coded payload truncated");
  return in_[pos_++];
}

void RangeDecoder::normalize() {
  while (range_ < kTop) {
    range_ <<= 8;
    code_ = (code_ << 8) | next_byte();
  }
}

int RangeDecoder::decode(BitModel& model) {
  const std::uint32_t bound = (range_ >> BitModel::kBits) * model.p0;
  int bit;
  if (code_ < bound) {
    range_ = bound;
    model.p0 = static_cast<std::uint16_t>(model.p0 + ((BitModel::kOne - model.p0) >> BitModel::kAdaptShift));
    bit = 0;
  } else {
    code_ -= bound;
    range_ -= bound;
    model.p0 = static_cast<std::uint16_t>(model.p0 - (model.p0 >> BitModel::kAdaptShift));
    bit = 1;
  }
  normalize();
  return bit;
}

int RangeDecoder::decode_direct() {
  range_ >>= 1;
  int bit = 0;
  if (code_ >= range_) {
    code_ -= range_;
    bit = 1;
  }
  normalize();
  return bit;
}

void RangeDecoder::finish() const {
  if (pos_ != in_.size()) throw Error(Errc::CorruptPayload, "trailing bytes after range-coded data");
}

}  // namespace brc
