#include <iostream>
#include <string>
#include <vector>

#if __has_include(<CLI11.hpp>)
#include <CLI11.hpp>
#else
#include <CLI/CLI.hpp>
#endif

#include "cli/commands.hpp"
#include "cli/scenario.hpp"

using namespace ringtally;

int main(int argc, char** argv) {
  CLI::App app{"ringtally: count bucket membership around a ring without revealing who"};
  app.require_subcommand(1);

  cli::SimulateOptions simulate;
  std::string simulate_transcript;
  auto* sim = app.add_subcommand("simulate", "Run every participant in-process and report the tally");
  sim->add_option("config", simulate.config, "Scenario config file")->required()->check(CLI::ExistingFile);
  sim->add_option("-t,--transcript", simulate_transcript, "Write the public transcript here");

  cli::NodeOptions node;
  std::string node_transcript;
  auto* nod = app.add_subcommand("node", "Run one participant over TCP");
  nod->add_option("roster", node.roster, "Roster file: '<index> <host:port>' per line")->required();
  nod->add_option("index", node.index, "This participant's index")->required();
  nod->add_option("config", node.config, "Scenario config (this node's value line is enough)")->required();
  nod->add_option("-t,--transcript", node_transcript, "Write the calls this node placed here");
  nod->add_option("--timeout", node.timeout_s, "Seconds to wait for OK per call")->capture_default_str();
  nod->add_option("--idle-timeout", node.idle_timeout_s, "Seconds to wait for the next incoming call")
      ->capture_default_str();
  nod->add_option("--retries", node.retries, "Extra connection attempts per call")->capture_default_str();
  nod->add_option("--retry-delay-ms", node.retry_delay_ms, "Pause between connection attempts")
      ->capture_default_str();

  cli::VerifyOptions verify;
  auto* ver = app.add_subcommand("verify", "Replay a transcript and compare counts with the plain count");
  ver->add_option("transcript", verify.transcript, "Transcript file")->required();
  ver->add_option("config", verify.config, "Scenario config used for the run")->required();

  cli::AttackOptions attack;
  std::vector<std::size_t> colluders;
  BucketId attack_bucket = 0;
  std::string attack_config;
  auto* att = app.add_subcommand("attack", "Colluders try to recover a target's membership bits");
  att->add_option("transcript", attack.transcript, "Transcript file")->required();
  att->add_option("--colluders", colluders, "Comma-separated colluding participants")->delimiter(',')->required();
  att->add_option("--target", attack.target, "Participant under attack")->required();
  att->add_option("--budget", attack.budget, "Brute-force discrete-log step budget")->capture_default_str();
  att->add_option("--bucket", attack_bucket, "Only this bucket");
  att->add_option("--config", attack_config, "Scenario config for ground truth and colluders' own bits");

  cli::ProbeOptions probe;
  BucketId probe_bucket = 0;
  std::string probe_config;
  auto* prb = app.add_subcommand("probe", "Eavesdropper Jacobi-symbol probe on round-2 values");
  prb->add_option("transcript", probe.transcript, "Transcript file")->required();
  prb->add_option("--bucket", probe_bucket, "Only this bucket");
  prb->add_option("--config", probe_config, "Scenario config for ground truth");

  std::size_t gen_n = 20;
  std::size_t gen_b = 100;
  std::uint64_t gen_seed = 1;
  std::string gen_mode = "centimillionaire";
  std::string gen_params = "random";
  unsigned gen_bits = 64;
  std::string gen_announce = "calls";
  bool gen_faithful = false;
  auto* gen = app.add_subcommand("generate", "Print a config with random secrets");
  gen->add_option("-N", gen_n, "Participants")->capture_default_str();
  gen->add_option("-B", gen_b, "Buckets")->capture_default_str();
  gen->add_option("--seed", gen_seed, "Seed for secrets and the run")->capture_default_str();
  gen->add_option("--mode", gen_mode)->check(CLI::IsMember({"centimillionaire", "generic"}))->capture_default_str();
  gen->add_option("--params", gen_params)->check(CLI::IsMember({"fermat", "random"}))->capture_default_str();
  gen->add_option("--bits", gen_bits, "Modulus bits in random mode")->capture_default_str();
  gen->add_option("--announce", gen_announce)->check(CLI::IsMember({"calls", "broadcast"}))->capture_default_str();
  gen->add_flag("--faithful", gen_faithful, "Do not require jacobi(x, n) = +1");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : cli::kExitUsage;
  }

  if (*sim) {
    if (!simulate_transcript.empty()) simulate.transcript = simulate_transcript;
    return cli::cmd_simulate(simulate, std::cout, std::cerr);
  }
  if (*nod) {
    if (!node_transcript.empty()) node.transcript = node_transcript;
    return cli::cmd_node(node, std::cout, std::cerr);
  }
  if (*ver) return cli::cmd_verify(verify, std::cout, std::cerr);
  if (*att) {
    attack.colluders.insert(colluders.begin(), colluders.end());
    if (attack_bucket != 0) attack.bucket = attack_bucket;
    if (!attack_config.empty()) attack.config = attack_config;
    return cli::cmd_attack(attack, std::cout, std::cerr);
  }
  if (*prb) {
    if (probe_bucket != 0) probe.bucket = probe_bucket;
    if (!probe_config.empty()) probe.config = probe_config;
    return cli::cmd_probe(probe, std::cout, std::cerr);
  }
  if (*gen) {
    auto mode = gen_mode == "generic" ? cli::ValueMode::kGeneric : cli::ValueMode::kCentimillionaire;
    auto config = cli::random_scenario(gen_n, gen_b, gen_seed, mode);
    config.prime_mode = gen_params == "fermat" ? params::PrimeMode::kFermat : params::PrimeMode::kRandom;
    config.bits = gen_bits;
    config.announce = gen_announce == "broadcast" ? protocol::AnnounceMode::kBroadcast : protocol::AnnounceMode::kCalls;
    config.faithful_x = gen_faithful;
    std::cout << cli::format_config(config);
    return cli::kExitOk;
  }
  return cli::kExitUsage;
}
