#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>

#include "cli/scenario.hpp"
#include "ringtally/error.hpp"
#include "ringtally/protocol.hpp"

namespace ringtally::cli {

/// Stable process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitMismatch = 1,
  kExitUsage = 2,
  kExitProtocolFault = 3,
  kExitTransportFault = 4,
};

int exit_code_for(Errc code);

struct SimulateOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> transcript;
};

struct NodeOptions {
  std::filesystem::path roster;
  std::size_t index = 0;
  std::filesystem::path config;
  std::optional<std::filesystem::path> transcript;
  double timeout_s = 30.0;
  double idle_timeout_s = 300.0;
  unsigned retries = 50;
  unsigned retry_delay_ms = 100;
};

struct VerifyOptions {
  std::filesystem::path transcript;
  std::filesystem::path config;
};

struct AttackOptions {
  std::filesystem::path transcript;
  std::set<std::size_t> colluders;
  std::size_t target = 0;
  std::uint64_t budget = std::uint64_t{1} << 20;
  std::optional<BucketId> bucket;
  std::optional<std::filesystem::path> config;
};

struct ProbeOptions {
  std::filesystem::path transcript;
  std::optional<BucketId> bucket;
  std::optional<std::filesystem::path> config;
};

/// Per-bucket counts, richest/poorest occupied buckets and call accounting.
std::string format_report(const ScenarioConfig& config, const protocol::TallyResult& result);

int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err);
int cmd_node(const NodeOptions& options, std::ostream& out, std::ostream& err);
int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err);
int cmd_attack(const AttackOptions& options, std::ostream& out, std::ostream& err);
int cmd_probe(const ProbeOptions& options, std::ostream& out, std::ostream& err);

}  // namespace ringtally::cli
