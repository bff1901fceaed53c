// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <chrono>
#include <cstdio>
#include <functional>
#include <future>
#include <sstream>
#include <string>

#include "ringtally/analysis.hpp"
#include "ringtally/bigmod.hpp"
#include "ringtally/error.hpp"
#include "ringtally/node.hpp"
#include "ringtally/protocol.hpp"
#include "ringtally/transcript.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace ringtally;
using namespace std::chrono_literals;
using Clock = std::chrono::steady_clock;

namespace {

// Pinned tolerances.
constexpr std::size_t kDefaultRing = 20;
constexpr std::size_t kDefaultBuckets = 100;
constexpr std::size_t kCallsBeforeExtraction = 39;
constexpr std::size_t kTotalCalls = 58;
constexpr std::size_t kFirstLegLines = 100;
constexpr std::size_t kFirstLegNumbers = 400;
constexpr double kDefaultRunLimitS = 10.0;
constexpr std::size_t kOracleScenarios = 500;
constexpr std::size_t kPairSamples = 100;
constexpr std::size_t kAttackRuns = 50;
constexpr double kAttackLimitS = 1.0;
constexpr std::size_t kHardnessRuns = 20;
constexpr std::uint64_t kHardnessBudget = std::uint64_t{1} << 20;
constexpr unsigned kHardnessOrderBits = 40;
constexpr std::size_t kRoundTripMessages = 10'000;

struct Check {
  bool ok = true;
  std::ostringstream detail;

  void require(bool cond, const std::string& what) {
    if (!cond && ok) detail << "first failure: " << what << "; ";
    ok = ok && cond;
  }
};

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<protocol::Secret> random_secrets(Rng& rng, std::size_t n, std::size_t buckets, bool generic) {
  std::vector<protocol::Secret> out;
  for (std::size_t i = 0; i < n; ++i) {
    if (generic) {
      std::vector<bool> bits(buckets);
      for (std::size_t b = 0; b < buckets; ++b) bits[b] = rng.next_u64() & 1;
      out.push_back(protocol::Secret::membership(bits));
    } else {
      out.push_back(protocol::Secret::in_bucket(static_cast<BucketId>(1 + rng.next_u64() % buckets)));
    }
  }
  return out;
}

// A run that keeps the actors, so their private pairs can be inspected.
struct FullRun {
  std::vector<protocol::Participant> participants;
  protocol::TallyOutcome outcome;
};

FullRun run_keeping_actors(const protocol::TallySettings& settings, const std::vector<protocol::Secret>& secrets,
                           std::uint64_t seed) {
  FullRun run{protocol::make_participants(settings, secrets, seed), {}};
  transport::InMemoryTransport t(settings.ring());
  run.outcome = protocol::run_tally(run.participants, t);
  return run;
}

bool counts_match_oracle(const protocol::TallyOutcome& out, const std::vector<protocol::Secret>& secrets,
                         std::size_t buckets) {
  if (!out.result.faults.empty() || out.result.counts.size() != buckets) return false;
  for (BucketId b = 1; b <= buckets; ++b)
    if (out.result.counts.at(b) != analysis::oracle_count(secrets, b)) return false;
  return true;
}

// Shared state between criteria that reuse the default-size run.
struct DefaultRun {
  protocol::TallySettings settings;
  std::vector<protocol::Secret> secrets;
  std::uint64_t seed = 20;
  protocol::TallyOutcome outcome;
  double seconds = 0;
};

DefaultRun& default_run() {
  static DefaultRun run = [] {
    DefaultRun r;
    r.settings.ring_size = kDefaultRing;
    r.settings.bucket_count = kDefaultBuckets;
    Rng rng(r.seed, 77);
    r.secrets = random_secrets(rng, kDefaultRing, kDefaultBuckets, false);
    auto start = Clock::now();
    r.outcome = protocol::run_tally(r.settings, r.secrets, r.seed);
    r.seconds = seconds_since(start);
    return r;
  }();
  return run;
}

// 1
Check call_accounting() {
  Check c;
  DefaultRun& run = default_run();

  // Step the actors by hand to find the call after which the extractor knows.
  auto participants = protocol::make_participants(run.settings, run.secrets, run.seed);
  transport::InMemoryTransport t(run.settings.ring());
  for (const auto& call : participants.front().initiate()) t.send_call(call.leg);
  std::size_t legs_when_known = 0;
  while (auto d = t.poll()) {
    const auto triggered = participants[d->recipient - 1].on_leg(d->leg);
    if (legs_when_known == 0 && !participants.back().state().counts.empty()) {
      legs_when_known = t.transcript().size();
      for (std::size_t i = 0; i + 1 < participants.size(); ++i)
        c.require(participants[i].state().counts.empty(), "a non-extractor knew the counts early");
    }
    for (const auto& call : triggered) t.send_call(call.leg);
  }
  const std::size_t total = t.transcript().size();
  c.require(legs_when_known == kCallsBeforeExtraction, "calls before extraction");
  c.require(run.outcome.result.protocol_calls == kCallsBeforeExtraction, "protocol_calls");
  c.require(run.outcome.result.total_calls() == kTotalCalls, "total_calls");
  c.require(total == kTotalCalls, "transcript legs");
  c.require(run.seconds < kDefaultRunLimitS, "runtime");
  c.detail << "N=20 B=100 calls_before_extraction=" << legs_when_known << " (want 39) total=" << total
           << " (want 58) runtime=" << run.seconds << "s (limit 10s)";
  return c;
}

// 2
Check first_call_payload() {
  Check c;
  const auto& first = default_run().outcome.transcript.legs().front();
  std::size_t lines = 0, numbers = 0;
  for (const auto& m : first.leg.body()) {
    c.require(m.kind == transport::MessageKind::kR1, "non-R1 line on first leg");
    ++lines;
    numbers += m.payload.size();
  }
  c.require(first.leg.from == 1 && first.leg.to == 2, "first leg is C1->C2");
  c.require(lines == kFirstLegLines && numbers == kFirstLegNumbers, "payload size");
  c.detail << "C" << first.leg.from << "->C" << first.leg.to << " R1 lines=" << lines << " numbers=" << numbers
           << " (want 100 / 400)";
  return c;
}

// 3, 4, 5 share the scenario sweep.
struct Sweep {
  std::size_t scenarios = 0;
  std::size_t oracle_mismatches = 0;
  std::size_t fermat = 0;
  std::size_t random = 0;
  std::size_t params_checked = 0;
  std::size_t extraction_failures = 0;
  std::size_t pairs_checked = 0;
  std::size_t identity_failures = 0;
};

Sweep& sweep() {
  static Sweep s = [] {
    Sweep s;
    Rng rng(3, 3);
    for (std::uint64_t seed = 0; s.scenarios < kOracleScenarios; ++seed) {
      protocol::TallySettings settings;
      settings.ring_size = 2 + rng.next_u64() % 7;
      settings.bucket_count = 1 + rng.next_u64() % 6;
      settings.prime_mode = seed % 2 == 0 ? params::PrimeMode::kFermat : params::PrimeMode::kRandom;
      settings.announce = seed % 3 == 0 ? protocol::AnnounceMode::kBroadcast : protocol::AnnounceMode::kCalls;
      auto secrets = random_secrets(rng, settings.ring_size, settings.bucket_count, seed % 4 >= 2);
      FullRun run = run_keeping_actors(settings, secrets, seed);
      ++s.scenarios;
      (settings.prime_mode == params::PrimeMode::kFermat ? s.fermat : s.random)++;
      if (!counts_match_oracle(run.outcome, secrets, settings.bucket_count)) ++s.oracle_mismatches;

      for (BucketId b = 1; b <= settings.bucket_count; ++b) {
        const auto bp = analysis::params_from_transcript(run.outcome.transcript, b);
        ++s.params_checked;
        for (std::size_t k = 0; k <= settings.ring_size; ++k) {
          const Natural final_value = bigmod::modpow(bp.x, Natural(1) << k, bp.n);
          try {
            if (protocol::extract_count(bp, {b, final_value}) != k) ++s.extraction_failures;
          } catch (const Error&) {
            ++s.extraction_failures;
          }
        }
      }

      for (const auto& p : run.participants) {
        for (const auto& [b, pair] : p.state().pairs) {
          const auto& bp = p.state().params.at(b);
          ++s.pairs_checked;
          for (std::size_t i = 0; i < kPairSamples;) {
            const Natural a = rng.between(2, bp.n - 1);
            if (bigmod::gcd(a, bp.n) != 1) continue;
            ++i;
            const Natural lhs = bigmod::modpow(bigmod::modpow(a, pair.e, bp.n), pair.d, bp.n);
            if (lhs != bigmod::modpow(a, pair.w(), bp.n)) ++s.identity_failures;
          }
        }
      }
    }
    return s;
  }();
  return s;
}

Check oracle_equivalence() {
  Check c;
  const Sweep& s = sweep();
  DefaultRun& run = default_run();
  const bool default_ok = counts_match_oracle(run.outcome, run.secrets, kDefaultBuckets);
  c.require(s.scenarios >= kOracleScenarios, "scenario count");
  c.require(s.fermat > 0 && s.random > 0, "both param modes");
  c.require(s.oracle_mismatches == 0, "oracle mismatch");
  c.require(default_ok, "N=20 B=100 run");
  c.detail << s.scenarios << " scenarios (fermat " << s.fermat << ", random " << s.random
           << ") mismatches=" << s.oracle_mismatches << "; N=20 B=100 " << (default_ok ? "exact" : "MISMATCH");
  return c;
}

Check extraction_inverse() {
  Check c;
  const Sweep& s = sweep();
  c.require(s.params_checked > 0 && s.extraction_failures == 0, "extract_count inverse");
  c.detail << s.params_checked << " bucket params, every k in 0..N, failures=" << s.extraction_failures;
  return c;
}

Check pair_identity() {
  Check c;
  const Sweep& s = sweep();
  c.require(s.pairs_checked > 0 && s.identity_failures == 0, "(a^e)^d = a^w");
  c.detail << s.pairs_checked << " pairs x " << kPairSamples << " coprime a, failures=" << s.identity_failures;
  return c;
}

// 6
Check boundary_disclosure() {
  Check c;
  std::size_t runs = 0;
  for (std::size_t n = 2; n <= kDefaultRing; ++n) {
    for (auto mode : {params::PrimeMode::kFermat, params::PrimeMode::kRandom}) {
      if (mode == params::PrimeMode::kFermat && n > params::kMaxFermatRing) continue;
      protocol::TallySettings settings;
      settings.ring_size = n;
      settings.bucket_count = 3;
      settings.prime_mode = mode;
      // Everyone in bucket 2: bucket 2 has k = N, buckets 1 and 3 have k = 0.
      std::vector<protocol::Secret> secrets(n, protocol::Secret::in_bucket(2));
      auto out = protocol::run_tally(settings, secrets, n * 31);
      ++runs;
      const auto& counts = out.result.counts;
      c.require(counts.size() == 3 && counts.at(1) == 0 && counts.at(2) == n && counts.at(3) == 0,
                "N=" + std::to_string(n));
    }
  }
  c.detail << runs << " runs with k=0 and k=N buckets, N=2..20, both modes where allowed";
  return c;
}

// 7
Check fermat_attack() {
  Check c;
  std::size_t correct = 0;
  double slowest = 0;
  Rng rng(7, 7);
  for (std::uint64_t run = 0; run < kAttackRuns; ++run) {
    protocol::TallySettings settings;
    settings.ring_size = 3 + rng.next_u64() % (params::kMaxFermatRing - 2);
    settings.bucket_count = 4;
    settings.prime_mode = params::PrimeMode::kFermat;
    auto secrets = random_secrets(rng, settings.ring_size, settings.bucket_count, run % 2 == 1);
    auto out = protocol::run_tally(settings, secrets, 1000 + run);

    auto start = Clock::now();
    bool all_right = true;
    for (BucketId b = 1; b <= settings.bucket_count; ++b) {
      const auto bp = analysis::params_from_transcript(out.transcript, b);
      const auto attack = analysis::collusion_attack(out.transcript, {1, 3}, 2, bp, 0);
      const auto want = secrets[1].is_member(b) ? analysis::InferredBit::kMember : analysis::InferredBit::kNonmember;
      all_right = all_right && attack.inferred == want;
    }
    const double took = seconds_since(start);
    slowest = std::max(slowest, took);
    if (all_right && took < kAttackLimitS) ++correct;
  }
  c.require(correct == kAttackRuns, "attack runs");
  c.detail << correct << "/" << kAttackRuns << " runs inferred C2's true bit in every bucket, slowest "
           << slowest << "s (limit 1s)";
  return c;
}

// 8
Check budgeted_hardness() {
  Check c;
  std::size_t inconclusive = 0, examined = 0, skipped_low_order = 0;
  std::uint64_t max_work = 0;
  Rng rng(8, 8);
  for (std::uint64_t seed = 0; examined < kHardnessRuns; ++seed) {
    protocol::TallySettings settings;
    settings.ring_size = 3 + rng.next_u64() % 6;
    settings.bucket_count = 1;
    auto secrets = random_secrets(rng, settings.ring_size, 1, false);
    auto out = protocol::run_tally(settings, secrets, 5000 + seed);
    const auto bp = analysis::params_from_transcript(out.transcript, 1);
    // The target's round-1 input is x raised to a unit exponent, so it has ord(x).
    if (analysis::multiplicative_order(bp.x, bp.p, bp.q) <= (Natural(1) << kHardnessOrderBits)) {
      ++skipped_low_order;
      continue;
    }
    ++examined;
    const auto attack = analysis::collusion_attack(out.transcript, {1, 3}, 2, bp, kHardnessBudget);
    max_work = std::max(max_work, attack.work);
    if (attack.inferred == analysis::InferredBit::kInconclusive) ++inconclusive;
  }
  c.require(inconclusive == kHardnessRuns, "inconclusive runs");
  c.detail << inconclusive << "/" << kHardnessRuns << " inconclusive at budget 2^20 (order > 2^40; "
           << skipped_low_order << " lower-order draws skipped), max work " << max_work;
  return c;
}

// 9
Check round_trip() {
  Check c;
  Rng rng(9, 9);
  std::size_t failures = 0;
  for (std::size_t i = 0; i < kRoundTripMessages; ++i) {
    const auto m = testutil::random_message(rng);
    if (transport::decode(transport::encode(m)) != m) ++failures;
  }
  auto dir = testutil::scratch_dir("acceptance");
  const auto& transcript = default_run().outcome.transcript;
  transport::persist_transcript(transcript, dir / "a.txt");
  const auto loaded = transport::load_transcript(dir / "a.txt");
  transport::persist_transcript(loaded, dir / "b.txt");
  const std::string a = testutil::read_file(dir / "a.txt");
  const bool identical = loaded == transcript && a == testutil::read_file(dir / "b.txt");
  std::filesystem::remove_all(dir);
  c.require(failures == 0, "decode(encode(m)) != m");
  c.require(identical, "persist/load");
  c.detail << kRoundTripMessages << " messages, failures=" << failures << "; N=20 B=100 transcript ("
           << a.size() << " bytes) persist/load " << (identical ? "byte-identical" : "DIFFERS");
  return c;
}

// 10
Check transport_equivalence() {
  Check c;
  protocol::TallySettings settings;
  settings.ring_size = 3;
  settings.bucket_count = 10;
  Rng rng(10, 10);
  auto secrets = random_secrets(rng, 3, 10, false);
  const std::uint64_t seed = 10;
  const auto simulated = protocol::run_tally(settings, secrets, seed);

  std::vector<std::unique_ptr<transport::Listener>> listeners;
  transport::Roster roster;
  for (std::size_t i = 1; i <= 3; ++i) {
    listeners.push_back(std::make_unique<transport::Listener>(transport::Endpoint{"127.0.0.1", 0}));
    roster[i] = listeners.back()->endpoint();
  }
  auto participants = protocol::make_participants(settings, secrets, seed);
  transport::NodeOptions options;
  options.tcp = transport::TcpOptions{5s, 20, 50ms};
  options.idle_timeout = 30s;
  std::vector<std::future<transport::NodeOutcome>> nodes;
  for (std::size_t i = 0; i < 3; ++i)
    nodes.push_back(std::async(std::launch::async,
                               [&, i] { return transport::run_node(participants[i], roster, *listeners[i], options); }));
  std::vector<transport::Transcript> parts;
  bool counts_equal = true;
  for (auto& n : nodes) {
    try {
      auto out = n.get();
      counts_equal = counts_equal && out.counts == simulated.result.counts;
      parts.push_back(out.sent);
    } catch (const std::exception& e) {
      counts_equal = false;
      c.detail << "node error: " << e.what() << "; ";
    }
  }
  const bool transcript_equal = counts_equal && transport::Transcript::merge(parts) == simulated.transcript;
  c.require(counts_equal, "counts");
  c.require(transcript_equal, "merged transcript");
  c.detail << "3 nodes on localhost: counts " << (counts_equal ? "identical" : "DIFFER") << ", merged transcript "
           << (transcript_equal ? "identical" : "DIFFERS") << " to the in-process run";
  return c;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Check()>>> criteria{
      {"call accounting", call_accounting},
      {"first-call payload", first_call_payload},
      {"oracle equivalence", oracle_equivalence},
      {"extraction inverse", extraction_inverse},
      {"pair identity", pair_identity},
      {"boundary disclosure", boundary_disclosure},
      {"attack on 2-smooth parameters", fermat_attack},
      {"budgeted hardness", budgeted_hardness},
      {"wire/transcript round-trip", round_trip},
      {"transport equivalence", transport_equivalence},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto& [name, run] = criteria[i];
    Check c;
    const auto start = Clock::now();
    try {
      c = run();
    } catch (const std::exception& e) {
      c.ok = false;
      c.detail << "exception: " << e.what();
    }
    std::printf("%s %2zu %-30s %s [%.2fs]\n", c.ok ? "PASS" : "FAIL", i + 1, name.c_str(), c.detail.str().c_str(),
                seconds_since(start));
    std::fflush(stdout);
    if (!c.ok) ++failed;
  }
  std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
