#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "ringtally/protocol.hpp"

namespace ringtally::cli {

enum class ValueMode { kCentimillionaire, kGeneric };

/// A run described by a config file:
///
///   N=<n> B=<b> seed=<s> mode=<centimillionaire|generic> params=<fermat|random> bits=<k> announce=<calls|broadcast>
///   <index> <bucket>           (centimillionaire: wealth in centimillions, 1..B)
///   <index> <bitstring>        (generic: B characters of 0/1, bucket 1 first)
///
/// An optional `faithful=1` key on the header drops the jacobi(x, n) = +1
/// constraint when choosing x. Blank lines and `#` comments are ignored.
struct ScenarioConfig {
  std::size_t ring_size = 20;
  std::size_t bucket_count = 100;
  std::uint64_t seed = 1;
  ValueMode mode = ValueMode::kCentimillionaire;
  params::PrimeMode prime_mode = params::PrimeMode::kRandom;
  unsigned bits = params::kDefaultModulusBits;
  protocol::AnnounceMode announce = protocol::AnnounceMode::kCalls;
  bool faithful_x = false;
  /// Participant index -> secret.
  std::map<std::size_t, protocol::Secret> values;

  protocol::TallySettings settings() const;
  /// Secrets in index order; requires every participant's line.
  std::vector<protocol::Secret> secrets() const;
};

/// Throws Errc::kInvalidInput (with the offending line) on any violation.
/// With `require_all_values` false only the listed participants need a line,
/// which is what a networked node gets to see.
ScenarioConfig parse_config(std::string_view text, bool require_all_values = true);
ScenarioConfig load_config(const std::filesystem::path& path, bool require_all_values = true);
std::string format_config(const ScenarioConfig& config);

/// Random secrets for a ring of `ring_size` over `bucket_count` buckets.
ScenarioConfig random_scenario(std::size_t ring_size, std::size_t bucket_count, std::uint64_t seed,
                               ValueMode mode = ValueMode::kCentimillionaire);

}  // namespace ringtally::cli
