#include "ringtally/error.hpp"

namespace ringtally {

const char* errc_name(Errc code) noexcept {
  switch (code) {
    case Errc::kInvalidModulus: return "invalid-modulus";
    case Errc::kNotInvertible: return "not-invertible";
    case Errc::kInvalidInput: return "invalid-input";
    case Errc::kSearchFailed: return "search-failed";
    case Errc::kUnsatisfiable: return "unsatisfiable";
    case Errc::kCorruptedAccumulator: return "corrupted-accumulator";
    case Errc::kProtocolOrder: return "protocol-order";
    case Errc::kTallyMismatch: return "tally-mismatch";
    case Errc::kMalformedLine: return "malformed-line";
    case Errc::kTransport: return "transport";
    case Errc::kTimeout: return "timeout";
    case Errc::kMissingData: return "missing-data";
    case Errc::kNoSolution: return "no-solution";
  }
  return "unknown";
}

}  // namespace ringtally
