#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ringtally {

enum class Errc {
  kInvalidModulus,
  kNotInvertible,
  kInvalidInput,
  kSearchFailed,
  kUnsatisfiable,
  kCorruptedAccumulator,
  kProtocolOrder,
  kTallyMismatch,
  kMalformedLine,
  kTransport,
  kTimeout,
  kMissingData,
  kNoSolution,
};

const char* errc_name(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

/// A wire or file line that failed strict parsing. `line` is 1-based and 0 when
/// the text was not read from a multi-line source.
class MalformedLine : public Error {
 public:
  MalformedLine(const std::string& what, std::size_t offset, std::size_t line = 0)
      : Error(Errc::kMalformedLine, describe(what, offset, line)), offset_(offset), line_(line) {}

  std::size_t offset() const noexcept { return offset_; }
  std::size_t line() const noexcept { return line_; }

 private:
  static std::string describe(const std::string& what, std::size_t offset, std::size_t line) {
    std::string s = what + " at byte " + std::to_string(offset);
    if (line != 0) s += " of line " + std::to_string(line);
    return s;
  }

  std::size_t offset_;
  std::size_t line_;
};

}  // namespace ringtally
