#include "cli/scenario.hpp"

#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>

#include "ringtally/error.hpp"
#include "ringtally/rng.hpp"

namespace ringtally::cli {

namespace {

[[noreturn]] void bad(std::size_t line_no, const std::string& why) {
  throw Error(Errc::kInvalidInput, "config line " + std::to_string(line_no) + ": " + why);
}

std::uint64_t to_number(std::string_view text, std::size_t line_no, std::string_view key) {
  std::uint64_t value = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
    bad(line_no, "'" + std::string(key) + "' needs a nonnegative integer, got '" + std::string(text) + "'");
  }
  return value;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    const std::size_t start = i;
    while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r') ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

void parse_header(ScenarioConfig& config, std::string_view line, std::size_t line_no) {
  bool saw_n = false;
  bool saw_b = false;
  for (const auto field : split(line)) {
    const auto eq = field.find('=');
    if (eq == std::string_view::npos) bad(line_no, "expected key=value, got '" + std::string(field) + "'");
    const auto key = field.substr(0, eq);
    const auto value = field.substr(eq + 1);
    if (key == "N") {
      config.ring_size = to_number(value, line_no, key);
      saw_n = true;
    } else if (key == "B") {
      config.bucket_count = to_number(value, line_no, key);
      saw_b = true;
    } else if (key == "seed") {
      config.seed = to_number(value, line_no, key);
    } else if (key == "bits") {
      config.bits = static_cast<unsigned>(to_number(value, line_no, key));
    } else if (key == "faithful") {
      config.faithful_x = to_number(value, line_no, key) != 0;
    } else if (key == "mode") {
      if (value == "centimillionaire") {
        config.mode = ValueMode::kCentimillionaire;
      } else if (value == "generic") {
        config.mode = ValueMode::kGeneric;
      } else {
        bad(line_no, "mode must be centimillionaire or generic");
      }
    } else if (key == "params") {
      if (value == "fermat") {
        config.prime_mode = params::PrimeMode::kFermat;
      } else if (value == "random") {
        config.prime_mode = params::PrimeMode::kRandom;
      } else {
        bad(line_no, "params must be fermat or random");
      }
    } else if (key == "announce") {
      if (value == "calls") {
        config.announce = protocol::AnnounceMode::kCalls;
      } else if (value == "broadcast") {
        config.announce = protocol::AnnounceMode::kBroadcast;
      } else {
        bad(line_no, "announce must be calls or broadcast");
      }
    } else {
      bad(line_no, "unknown key '" + std::string(key) + "'");
    }
  }
  if (!saw_n || !saw_b) bad(line_no, "header must set N and B");
  if (config.ring_size < 2) bad(line_no, "N must be at least 2");
  if (config.bucket_count < 1) bad(line_no, "B must be at least 1");
  if (config.prime_mode == params::PrimeMode::kFermat && config.ring_size > params::kMaxFermatRing) {
    bad(line_no, "params=fermat supports at most N=" + std::to_string(params::kMaxFermatRing) +
                     " (the largest Fermat prime gives 2-adic order 2^16)");
  }
  if (config.prime_mode == params::PrimeMode::kRandom && config.bits / 2 < config.ring_size + 4) {
    bad(line_no, "bits=" + std::to_string(config.bits) + " too small for N=" + std::to_string(config.ring_size) +
                     "; need bits >= " + std::to_string(2 * (config.ring_size + 4)));
  }
}

}  // namespace

protocol::TallySettings ScenarioConfig::settings() const {
  protocol::TallySettings s;
  s.ring_size = ring_size;
  s.bucket_count = bucket_count;
  s.prime_mode = prime_mode;
  s.bits = bits;
  s.require_jacobi = !faithful_x;
  s.announce = announce;
  return s;
}

std::vector<protocol::Secret> ScenarioConfig::secrets() const {
  std::vector<protocol::Secret> out;
  for (std::size_t i = 1; i <= ring_size; ++i) {
    const auto it = values.find(i);
    if (it == values.end()) throw Error(Errc::kInvalidInput, "no value for participant " + std::to_string(i));
    out.push_back(it->second);
  }
  return out;
}

ScenarioConfig parse_config(std::string_view text, bool require_all_values) {
  ScenarioConfig config;
  bool have_header = false;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    const auto fields = split(line);
    if (fields.empty()) continue;

    if (!have_header) {
      parse_header(config, line, line_no);
      have_header = true;
      continue;
    }
    if (fields.size() != 2) bad(line_no, "expected '<index> <value>'");
    const std::size_t index = to_number(fields[0], line_no, "index");
    if (index < 1 || index > config.ring_size) bad(line_no, "index outside 1..N");
    if (config.values.contains(index)) bad(line_no, "participant " + std::to_string(index) + " listed twice");
    if (config.mode == ValueMode::kCentimillionaire) {
      const std::uint64_t bucket = to_number(fields[1], line_no, "value");
      if (bucket < 1 || bucket > config.bucket_count) bad(line_no, "value outside 1..B");
      config.values.emplace(index, protocol::Secret::in_bucket(static_cast<BucketId>(bucket)));
    } else {
      const auto bits = fields[1];
      if (bits.size() != config.bucket_count) bad(line_no, "bitstring needs exactly B characters");
      std::vector<bool> membership;
      for (const char c : bits) {
        if (c != '0' && c != '1') bad(line_no, "bitstring may only contain 0 and 1");
        membership.push_back(c == '1');
      }
      config.values.emplace(index, protocol::Secret::membership(std::move(membership)));
    }
  }
  if (!have_header) throw Error(Errc::kInvalidInput, "config is empty");
  if (require_all_values && config.values.size() != config.ring_size) {
    throw Error(Errc::kInvalidInput, "config lists " + std::to_string(config.values.size()) +
                                         " participants, N=" + std::to_string(config.ring_size));
  }
  return config;
}

ScenarioConfig load_config(const std::filesystem::path& path, bool require_all_values) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::kInvalidInput, "cannot read config " + path.string());
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_config(text, require_all_values);
}

std::string format_config(const ScenarioConfig& config) {
  std::ostringstream out;
  out << "N=" << config.ring_size << " B=" << config.bucket_count << " seed=" << config.seed
      << " mode=" << (config.mode == ValueMode::kCentimillionaire ? "centimillionaire" : "generic")
      << " params=" << params::to_string(config.prime_mode) << " bits=" << config.bits
      << " announce=" << (config.announce == protocol::AnnounceMode::kCalls ? "calls" : "broadcast");
  if (config.faithful_x) out << " faithful=1";
  out << '\n';
  for (const auto& [index, secret] : config.values) {
    out << index << ' ';
    if (const auto* bucket = std::get_if<BucketId>(&secret.value)) {
      out << *bucket;
    } else {
      for (const bool bit : std::get<std::vector<bool>>(secret.value)) out << (bit ? '1' : '0');
    }
    out << '\n';
  }
  return out.str();
}

ScenarioConfig random_scenario(std::size_t ring_size, std::size_t bucket_count, std::uint64_t seed,
                               ValueMode mode) {
  ScenarioConfig config;
  config.ring_size = ring_size;
  config.bucket_count = bucket_count;
  config.seed = seed;
  config.mode = mode;
  Rng rng(seed, 0xC0FFEE);
  for (std::size_t i = 1; i <= ring_size; ++i) {
    if (mode == ValueMode::kCentimillionaire) {
      config.values.emplace(i, protocol::Secret::in_bucket(
                                   static_cast<BucketId>(1 + rng.below(bucket_count).get_ui())));
    } else {
      std::vector<bool> bits(bucket_count);
      for (std::size_t b = 0; b < bucket_count; ++b) bits[b] = (rng.next_u64() & 1) != 0;
      config.values.emplace(i, protocol::Secret::membership(std::move(bits)));
    }
  }
  return config;
}

}  // namespace ringtally::cli
