#include "cli/commands.hpp"

#include <map>
#include <ostream>
#include <sstream>
#include <vector>

#include "ringtally/analysis.hpp"
#include "ringtally/error.hpp"
#include "ringtally/node.hpp"
#include "ringtally/tcp.hpp"
#include "ringtally/transcript.hpp"

namespace ringtally::cli {

using std::chrono::milliseconds;

int exit_code_for(Errc code) {
  switch (code) {
    case Errc::kInvalidInput:
    case Errc::kMalformedLine:
    case Errc::kMissingData:
      return kExitUsage;
    case Errc::kTransport:
    case Errc::kTimeout:
      return kExitTransportFault;
    default:
      return kExitProtocolFault;
  }
}

namespace {

std::string scenario_line(const ScenarioConfig& config) {
  ScenarioConfig header = config;
  header.values.clear();
  return "scenario " + format_config(header);
}

std::map<BucketId, std::size_t> announced_counts(const transport::Transcript& transcript,
                                                 std::map<BucketId, std::string>& conflicts) {
  std::map<BucketId, std::size_t> out;
  for (const auto& rec : transcript.legs()) {
    for (const auto& m : rec.leg.messages) {
      if (m.kind != transport::MessageKind::kResult) continue;
      const std::size_t k = m.payload[0].get_ui();
      const auto [it, fresh] = out.emplace(*m.bucket, k);
      if (!fresh && it->second != k) conflicts.emplace(*m.bucket, "announcements disagree");
    }
  }
  return out;
}

std::vector<BucketId> buckets_to_examine(const transport::Transcript& transcript,
                                         const std::optional<BucketId>& only) {
  if (only) return {*only};
  if (transcript.empty()) throw Error(Errc::kMissingData, "empty transcript");
  const std::size_t count = transcript.legs().front().leg.messages.front().payload[2].get_ui();
  std::vector<BucketId> out;
  for (BucketId b = 1; b <= count; ++b) out.push_back(b);
  return out;
}

}  // namespace

std::string format_report(const ScenarioConfig& config, const protocol::TallyResult& result) {
  std::ostringstream out;
  out << scenario_line(config);
  std::optional<BucketId> richest;
  std::optional<BucketId> poorest;
  for (BucketId b = 1; b <= config.bucket_count; ++b) {
    if (const auto it = result.counts.find(b); it != result.counts.end()) {
      out << "bucket " << b << " count " << it->second << '\n';
      if (it->second > 0) {
        if (!poorest) poorest = b;
        richest = b;
      }
    } else if (const auto f = result.faults.find(b); f != result.faults.end()) {
      out << "bucket " << b << " fault " << f->second << '\n';
    }
  }
  if (config.mode == ValueMode::kCentimillionaire && richest) {
    out << "richest " << *richest << " size " << result.counts.at(*richest) << '\n';
    out << "poorest " << *poorest << " size " << result.counts.at(*poorest) << '\n';
  }
  out << "protocol_calls " << result.protocol_calls << '\n';
  out << "announce_calls " << result.announce_calls << '\n';
  out << "total_calls " << result.total_calls() << '\n';
  return out.str();
}

int cmd_simulate(const SimulateOptions& options, std::ostream& out, std::ostream& err) {
  ScenarioConfig config;
  try {
    config = load_config(options.config);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  try {
    const auto outcome = protocol::run_tally(config.settings(), config.secrets(), config.seed);
    if (options.transcript) transport::persist_transcript(outcome.transcript, *options.transcript);
    out << format_report(config, outcome.result);
    if (!outcome.result.faults.empty()) {
      err << "error: " << outcome.result.faults.size() << " bucket(s) faulted\n";
      return kExitProtocolFault;
    }
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
}

int cmd_node(const NodeOptions& options, std::ostream& out, std::ostream& err) {
  ScenarioConfig config;
  transport::Roster roster;
  try {
    config = load_config(options.config, false);
    roster = transport::load_roster(options.roster);
    if (!roster.contains(options.index) || options.index < 1 || options.index > config.ring_size) {
      throw Error(Errc::kInvalidInput, "index " + std::to_string(options.index) + " is not in the roster");
    }
    if (!config.values.contains(options.index)) {
      throw Error(Errc::kInvalidInput, "config has no value for participant " + std::to_string(options.index));
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    protocol::Participant self(options.index, config.values.at(options.index), config.settings(), config.seed);
    transport::Listener listener(roster.at(options.index));
    transport::NodeOptions node_options;
    node_options.tcp.timeout = milliseconds(static_cast<long>(options.timeout_s * 1000));
    node_options.tcp.retries = options.retries;
    node_options.tcp.retry_delay = milliseconds(options.retry_delay_ms);
    node_options.idle_timeout = milliseconds(static_cast<long>(options.idle_timeout_s * 1000));
    const auto outcome = transport::run_node(self, roster, listener, node_options);
    if (options.transcript) transport::persist_transcript(outcome.sent, *options.transcript);

    out << "participant " << options.index << '\n';
    for (const auto& [b, k] : outcome.counts) out << "bucket " << b << " count " << k << '\n';
    for (const auto& [b, what] : outcome.faults) out << "bucket " << b << " fault " << what << '\n';
    out << "calls_placed " << outcome.sent.size() << '\n';
    return outcome.faults.empty() ? kExitOk : kExitProtocolFault;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
}

int cmd_verify(const VerifyOptions& options, std::ostream& out, std::ostream& err) {
  transport::Transcript transcript;
  ScenarioConfig config;
  try {
    transcript = transport::load_transcript(options.transcript);
    config = load_config(options.config);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  const auto secrets = config.secrets();
  protocol::ReplayReport replay;
  try {
    replay = protocol::replay_transcript(transcript, config.settings(), secrets, config.seed);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
  std::map<BucketId, std::string> conflicts;
  const auto announced = announced_counts(transcript, conflicts);

  std::vector<BucketId> failed;
  for (BucketId b = 1; b <= config.bucket_count; ++b) {
    const std::size_t expected = analysis::oracle_count(secrets, b);
    std::string reason;
    if (const auto it = replay.mismatched.find(b); it != replay.mismatched.end()) {
      reason = it->second;
    } else if (const auto c = conflicts.find(b); c != conflicts.end()) {
      reason = c->second;
    } else if (const auto a = announced.find(b); a == announced.end()) {
      reason = "no announced count";
    } else if (a->second != expected) {
      reason = "announced " + std::to_string(a->second) + ", oracle " + std::to_string(expected);
    }
    if (reason.empty()) {
      out << "bucket " << b << " PASS " << expected << '\n';
    } else {
      out << "bucket " << b << " FAIL " << reason << '\n';
      failed.push_back(b);
    }
  }
  for (const auto& note : replay.notes) out << "note " << note << '\n';
  if (failed.empty() && replay.notes.empty()) {
    out << "verdict PASS\n";
    return kExitOk;
  }
  out << "verdict FAIL";
  for (const BucketId b : failed) out << ' ' << b;
  out << '\n';
  return kExitMismatch;
}

int cmd_attack(const AttackOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const auto transcript = transport::load_transcript(options.transcript);
    std::optional<ScenarioConfig> config;
    std::map<std::size_t, protocol::Secret> colluder_secrets;
    if (options.config) {
      config = load_config(*options.config);
      for (const std::size_t c : options.colluders) {
        if (const auto it = config->values.find(c); it != config->values.end()) colluder_secrets.emplace(c, it->second);
      }
    }

    std::size_t correct = 0;
    std::size_t inconclusive = 0;
    std::size_t examined = 0;
    for (const BucketId b : buckets_to_examine(transcript, options.bucket)) {
      const auto params = analysis::params_from_transcript(transcript, b);
      const auto outcome = analysis::collusion_attack(transcript, options.colluders, options.target, params,
                                                      options.budget, colluder_secrets);
      ++examined;
      out << "bucket " << b << " target " << outcome.target << " inferred " << analysis::to_string(outcome.inferred)
          << " method " << outcome.method << " work " << outcome.work;
      if (outcome.inferred == analysis::InferredBit::kInconclusive) ++inconclusive;
      if (config) {
        const bool member = config->values.at(options.target).is_member(b);
        out << " truth " << (member ? "member" : "nonmember");
        if (outcome.inferred != analysis::InferredBit::kInconclusive &&
            (outcome.inferred == analysis::InferredBit::kMember) == member) {
          ++correct;
        }
      }
      out << '\n';
    }
    out << "examined " << examined << " inconclusive " << inconclusive;
    if (config) out << " correct " << correct;
    out << '\n';
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
}

int cmd_probe(const ProbeOptions& options, std::ostream& out, std::ostream& err) {
  try {
    const auto transcript = transport::load_transcript(options.transcript);
    std::optional<ScenarioConfig> config;
    if (options.config) config = load_config(*options.config);

    std::size_t leaked = 0;
    for (const BucketId b : buckets_to_examine(transcript, options.bucket)) {
      const auto params = analysis::params_from_transcript(transcript, b);
      const auto probe = analysis::jacobi_probe(transcript, params);
      out << "bucket " << b << " jacobi_x " << (probe.channel_open ? "-1" : "+1") << " symbols";
      for (const int s : probe.round2_symbols) out << ' ' << (s > 0 ? '+' : s < 0 ? '-' : '0');
      if (probe.first_member) {
        ++leaked;
        out << " first_member " << *probe.first_member;
      } else {
        out << " inconclusive";
      }
      if (config) {
        std::optional<std::size_t> truth;
        for (const std::size_t index : config->settings().ring()) {
          if (config->values.at(index).is_member(b)) {
            truth = index;
            break;
          }
        }
        out << " truth " << (truth ? std::to_string(*truth) : "none");
      }
      out << '\n';
    }
    out << "leaked " << leaked << '\n';
    return kExitOk;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  }
}

}  // namespace ringtally::cli
