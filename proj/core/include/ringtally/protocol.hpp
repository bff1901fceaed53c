#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "ringtally/bigmod.hpp"
#include "ringtally/message.hpp"
#include "ringtally/params.hpp"
#include "ringtally/rng.hpp"
#include "ringtally/transcript.hpp"
#include "ringtally/transport.hpp"

namespace ringtally::protocol {

using params::BucketParams;
using params::ExponentPair;

enum class AnnounceMode { kCalls, kBroadcast };

struct TallySettings {
  std::size_t ring_size = 20;
  std::size_t bucket_count = 100;
  params::PrimeMode prime_mode = params::PrimeMode::kRandom;
  unsigned bits = params::kDefaultModulusBits;
  /// Extra constraint jacobi(x, n) = +1 on top of the distinctness condition.
  bool require_jacobi = true;
  AnnounceMode announce = AnnounceMode::kCalls;
  /// Call order by participant index; empty means 1, 2, ..., ring_size.
  std::vector<std::size_t> ring_order;

  std::vector<std::size_t> ring() const;
  /// Throws Errc::kInvalidInput when ring_order is not a permutation of 1..N.
  void validate() const;
};

/// What a participant keeps private: the single bucket holding their wealth
/// (centimillionaire mode) or one membership bit per bucket (generic mode).
struct Secret {
  std::variant<BucketId, std::vector<bool>> value;

  static Secret in_bucket(BucketId bucket) { return Secret{bucket}; }
  static Secret membership(std::vector<bool> bits) { return Secret{std::move(bits)}; }

  bool is_member(BucketId bucket) const;

  friend bool operator==(const Secret&, const Secret&) = default;
};

enum class Phase { kIdle, kRound1Done, kRound2Done };

/// Running residue x^(exponents applied so far) mod n for one bucket.
struct Accumulator {
  BucketId bucket_id = 0;
  Natural value;
};

struct ParticipantState {
  std::size_t index = 0;
  Secret secret;
  Phase phase = Phase::kIdle;
  /// Created on first contact with a bucket's params.
  std::map<BucketId, ExponentPair> pairs;
  std::map<BucketId, BucketParams> params;
  /// Derived counts: only the extractor holds any before the announcement.
  std::map<BucketId, std::size_t> counts;
  std::map<BucketId, std::string> faults;
};

/// Applies this participant's e to the incoming accumulator, generating the
/// bucket's pair on first use. Throws kCorruptedAccumulator when the incoming
/// value is not a unit in (1, n).
Accumulator round1_step(ParticipantState& state, const BucketParams& params,
                        const Accumulator& incoming, Rng& rng);

/// Applies the stored d. Throws kProtocolOrder when round 1 never ran for the
/// bucket, kCorruptedAccumulator as above.
Accumulator round2_step(ParticipantState& state, const BucketParams& params,
                        const Accumulator& incoming);

/// The unique k in 0..ring_size with x^(2^k) = final (mod n).
/// Throws kTallyMismatch when there is none.
std::size_t extract_count(const BucketParams& params, const Accumulator& final_value);

/// A leg together with its position in the global call order.
using OutgoingCall = transport::RecordedLeg;

/// One ring member. The same actor drives in-process simulation, replay and
/// networked nodes, so equal seeds give equal transcripts everywhere.
class Participant {
 public:
  Participant(std::size_t index, Secret secret, TallySettings settings, std::uint64_t seed);

  std::size_t index() const { return state_.index; }
  std::size_t position() const { return position_; }
  bool is_initiator() const { return position_ == 0; }
  bool is_extractor() const { return position_ + 1 == ring_.size(); }
  std::size_t successor() const { return ring_[(position_ + 1) % ring_.size()]; }
  std::size_t predecessor() const { return ring_[(position_ + ring_.size() - 1) % ring_.size()]; }

  /// Initiator only: picks every bucket's params and opens round 1.
  std::vector<OutgoingCall> initiate();

  /// Handles one incoming call and returns the calls it triggers. Per-bucket
  /// faults are recorded in state().faults and the bucket is dropped from the
  /// outgoing legs; a leg that is out of order throws kProtocolOrder.
  std::vector<OutgoingCall> on_leg(const transport::CallLeg& incoming);

  bool finished() const { return expect_ == Expect::kNothing; }
  const ParticipantState& state() const { return state_; }
  ParticipantState& state() { return state_; }
  const TallySettings& settings() const { return settings_; }

 private:
  enum class Expect { kStart, kRound1, kRound1Closing, kRound2, kResult, kNothing };

  std::vector<OutgoingCall> handle_round1(const std::vector<transport::ProtocolMessage>& body);
  std::vector<OutgoingCall> handle_closing(const std::vector<transport::ProtocolMessage>& body);
  std::vector<OutgoingCall> handle_round2(const std::vector<transport::ProtocolMessage>& body);
  void handle_result(const std::vector<transport::ProtocolMessage>& body);
  std::vector<OutgoingCall> announce();
  OutgoingCall leg_to(std::size_t to, std::uint64_t seq, std::vector<transport::ProtocolMessage> body) const;
  void record_fault(BucketId bucket, const std::string& what);

  TallySettings settings_;
  std::vector<std::size_t> ring_;
  std::size_t position_ = 0;
  ParticipantState state_;
  Rng rng_;
  Expect expect_ = Expect::kStart;
};

struct TallyResult {
  std::map<BucketId, std::size_t> counts;
  std::map<BucketId, std::string> faults;
  std::size_t protocol_calls = 0;
  std::size_t announce_calls = 0;

  std::size_t total_calls() const { return protocol_calls + announce_calls; }
};

struct TallyOutcome {
  TallyResult result;
  transport::Transcript transcript;
};

/// secrets[i] belongs to participant i + 1.
std::vector<Participant> make_participants(const TallySettings& settings,
                                           const std::vector<Secret>& secrets, std::uint64_t seed);

/// Drives the actors until no call is pending. Throws Errc::kTransport on
/// delivery failure and kProtocolOrder when an actor rejects a whole leg.
TallyOutcome run_tally(std::vector<Participant>& participants, transport::Transport& transport);

/// In-memory convenience overload.
TallyOutcome run_tally(const TallySettings& settings, const std::vector<Secret>& secrets,
                       std::uint64_t seed);

/// Number of protocol legs (both rounds) for a ring of n: 2n - 1.
constexpr std::size_t protocol_call_count(std::size_t ring_size) { return 2 * ring_size - 1; }

struct ReplayReport {
  /// Buckets whose recorded lines differ from what the actors recompute.
  std::map<BucketId, std::string> mismatched;
  /// Problems not tied to one bucket (missing or surplus legs).
  std::vector<std::string> notes;

  bool clean() const { return mismatched.empty() && notes.empty(); }
};

/// Feeds every recorded leg to fresh actors (rebuilt from the same secrets and
/// seed) and checks each leg they emit against the recorded one, line by line.
ReplayReport replay_transcript(const transport::Transcript& recorded, const TallySettings& settings,
                               const std::vector<Secret>& secrets, std::uint64_t seed);

}  // namespace ringtally::protocol
