#include "brc/error.hpp"

namespace brc {

const char* to_string(Errc code) noexcept {
  switch (code) {
    case Errc::Io: return "Io";
    case Errc::MalformedHeader: return "MalformedHeader";
    case Errc::UnsupportedDepth: return "UnsupportedDepth";
    case Errc::InvalidArgument: return "InvalidArgument";
    case Errc::BlockTooSmall: return "BlockTooSmall";
    case Errc::DegenerateSamples: return "DegenerateSamples";
    case Errc::NonMonotonicSamples: return "NonMonotonicSamples";
    case Errc::NonPositiveDistortion: return "NonPositiveDistortion";
    case Errc::InsufficientSamples: return "InsufficientSamples";
    case Errc::StepUnderflow: return "StepUnderflow";
    case Errc::UnsupportedBlockSize: return "UnsupportedBlockSize";
    case Errc::UnsupportedOperation: return "UnsupportedOperation";
    case Errc::CorruptPayload: return "CorruptPayload";
    case Errc::MalformedContainer: return "MalformedContainer";
  }
  return "Unknown";
}

}  // namespace brc
