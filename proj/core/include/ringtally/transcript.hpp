#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "ringtally/message.hpp"

namespace ringtally::transport {

/// A recorded call. Every line of the leg shares its seq; seq is strictly
/// increasing from one leg to the next.
struct RecordedLeg {
  std::uint64_t seq = 0;
  CallLeg leg;

  friend bool operator==(const RecordedLeg&, const RecordedLeg&) = default;
};

/// Public log of every call. Deliberately world-readable.
class Transcript {
 public:
  Transcript() = default;

  /// Throws Errc::kInvalidInput unless seq exceeds every recorded seq.
  void append(std::uint64_t seq, CallLeg leg);
  /// Appends with seq = last seq + 1.
  std::uint64_t append_next(CallLeg leg);

  const std::vector<RecordedLeg>& legs() const { return legs_; }
  bool empty() const { return legs_.empty(); }
  std::size_t size() const { return legs_.size(); }
  std::uint64_t last_seq() const { return legs_.empty() ? 0 : legs_.back().seq; }

  /// nullptr when absent.
  const RecordedLeg* find(std::uint64_t seq) const;

  /// Merges partial transcripts (e.g. one per networked node) by seq.
  static Transcript merge(const std::vector<Transcript>& parts);

  friend bool operator==(const Transcript&, const Transcript&) = default;

 private:
  std::vector<RecordedLeg> legs_;
};

/// One line per message: `<seq> <from> <to> <encoded message line>`.
std::string format_transcript(const Transcript& transcript);
/// Throws MalformedLine carrying the 1-based line number.
Transcript parse_transcript(std::string_view text);

void persist_transcript(const Transcript& transcript, const std::filesystem::path& path);
Transcript load_transcript(const std::filesystem::path& path);

}  // namespace ringtally::transport
