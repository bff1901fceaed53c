#include "ringtally/transcript.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <utility>

#include "ringtally/error.hpp"

namespace ringtally::transport {

void Transcript::append(std::uint64_t seq, CallLeg leg) {
  if (!legs_.empty() && seq <= legs_.back().seq) {
    throw Error(Errc::kInvalidInput, "transcript seq " + std::to_string(seq) +
                                         " does not follow " + std::to_string(legs_.back().seq));
  }
  legs_.push_back({seq, std::move(leg)});
}

std::uint64_t Transcript::append_next(CallLeg leg) {
  const std::uint64_t seq = last_seq() + 1;
  legs_.push_back({seq, std::move(leg)});
  return seq;
}

const RecordedLeg* Transcript::find(std::uint64_t seq) const {
  auto it = std::lower_bound(legs_.begin(), legs_.end(), seq,
                             [](const RecordedLeg& leg, std::uint64_t s) { return leg.seq < s; });
  return it != legs_.end() && it->seq == seq ? &*it : nullptr;
}

Transcript Transcript::merge(const std::vector<Transcript>& parts) {
  std::vector<RecordedLeg> all;
  for (const auto& part : parts) all.insert(all.end(), part.legs_.begin(), part.legs_.end());
  std::stable_sort(all.begin(), all.end(),
                   [](const RecordedLeg& a, const RecordedLeg& b) { return a.seq < b.seq; });
  Transcript out;
  for (auto& leg : all) out.append(leg.seq, std::move(leg.leg));
  return out;
}

std::string format_transcript(const Transcript& transcript) {
  std::string out;
  for (const auto& recorded : transcript.legs()) {
    const std::string prefix = std::to_string(recorded.seq) + ' ' +
                               std::to_string(recorded.leg.from) + ' ' +
                               std::to_string(recorded.leg.to) + ' ';
    for (const auto& message : recorded.leg.messages) {
      out += prefix;
      out += encode(message);
    }
  }
  return out;
}

namespace {

std::uint64_t parse_column(std::string_view text, std::size_t& pos, std::size_t line_no) {
  const std::size_t end = text.find(' ', pos);
  if (end == std::string_view::npos) throw MalformedLine("truncated entry", pos, line_no);
  const std::string_view field = text.substr(pos, end - pos);
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (field.empty() || ec != std::errc{} || ptr != field.data() + field.size() ||
      (field.size() > 1 && field.front() == '0')) {
    throw MalformedLine("bad numeric column '" + std::string(field) + "'", pos, line_no);
  }
  pos = end + 1;
  return value;
}

}  // namespace

Transcript parse_transcript(std::string_view text) {
  Transcript transcript;
  if (text.empty()) return transcript;
  if (text.back() != '\n') throw MalformedLine("missing final newline", text.size(), 0);

  struct Pending {
    std::uint64_t seq;
    CallLeg leg;
    std::size_t first_line;
  };
  std::optional<Pending> open;

  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t end = text.find('\n', start);
    const std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;

    std::size_t pos = 0;
    const std::uint64_t seq = parse_column(line, pos, line_no);
    const std::uint64_t from = parse_column(line, pos, line_no);
    const std::uint64_t to = parse_column(line, pos, line_no);
    ProtocolMessage message;
    try {
      message = decode(line.substr(pos));
    } catch (const MalformedLine& e) {
      throw MalformedLine("bad message", pos + e.offset(), line_no);
    }

    if (!open) {
      if (message.kind != MessageKind::kHello) throw MalformedLine("leg does not open with HELLO", pos, line_no);
      if (seq <= transcript.last_seq() && !transcript.empty()) {
        throw MalformedLine("seq not increasing", 0, line_no);
      }
      open = Pending{seq, CallLeg{from, to, {}}, line_no};
    } else if (open->seq != seq || open->leg.from != from || open->leg.to != to) {
      throw MalformedLine("entry interleaved with an unfinished leg", 0, line_no);
    }
    const bool closes = message.kind == MessageKind::kBye;
    open->leg.messages.push_back(std::move(message));
    if (closes) {
      try {
        validate_leg(open->leg);
      } catch (const Error& e) {
        throw MalformedLine(e.what(), 0, line_no);
      }
      transcript.append(open->seq, std::move(open->leg));
      open.reset();
    }
  }
  if (open) throw MalformedLine("leg without BYE", 0, open->first_line);
  return transcript;
}

void persist_transcript(const Transcript& transcript, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(Errc::kInvalidInput, "cannot write " + path.string());
  out << format_transcript(transcript);
  if (!out) throw Error(Errc::kInvalidInput, "short write to " + path.string());
}

Transcript load_transcript(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kInvalidInput, "cannot read " + path.string());
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_transcript(text);
}

}  // namespace ringtally::transport
