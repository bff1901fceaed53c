#include "ringtally/protocol.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

#include "ringtally/error.hpp"

namespace ringtally::protocol {

using transport::CallLeg;
using transport::MessageKind;
using transport::ProtocolMessage;

std::vector<std::size_t> TallySettings::ring() const {
  if (!ring_order.empty()) return ring_order;
  std::vector<std::size_t> order(ring_size);
  std::iota(order.begin(), order.end(), std::size_t{1});
  return order;
}

void TallySettings::validate() const {
  if (ring_size < 2) throw Error(Errc::kInvalidInput, "ring needs at least two participants");
  if (bucket_count < 1) throw Error(Errc::kInvalidInput, "need at least one bucket");
  if (ring_order.empty()) return;
  std::vector<std::size_t> sorted = ring_order;
  std::sort(sorted.begin(), sorted.end());
  std::vector<std::size_t> expected(ring_size);
  std::iota(expected.begin(), expected.end(), std::size_t{1});
  if (sorted != expected) throw Error(Errc::kInvalidInput, "ring order must be a permutation of 1..N");
}

bool Secret::is_member(BucketId bucket) const {
  if (const auto* own = std::get_if<BucketId>(&value)) return *own == bucket;
  const auto& bits = std::get<std::vector<bool>>(value);
  return bucket >= 1 && bucket <= bits.size() && bits[bucket - 1];
}

namespace {

void require_unit(const BucketParams& params, const Accumulator& acc) {
  if (acc.value <= 1 || acc.value >= params.n || bigmod::gcd(acc.value, params.n) != 1) {
    throw Error(Errc::kCorruptedAccumulator,
                "bucket " + std::to_string(params.bucket_id) + " received " + acc.value.get_str() +
                    ", not a unit in (1, n)");
  }
}

constexpr int kPairRedraws = 16;

}  // namespace

Accumulator round1_step(ParticipantState& state, const BucketParams& params,
                        const Accumulator& incoming, Rng& rng) {
  require_unit(params, incoming);
  const BucketId bucket = params.bucket_id;
  const bool member = state.secret.is_member(bucket);
  auto it = state.pairs.find(bucket);
  if (it == state.pairs.end()) {
    it = state.pairs.emplace(bucket, params::gen_exponent_pair(params.phi, member, rng)).first;
  }
  for (int attempt = 0;; ++attempt) {
    Natural out = bigmod::modpow(incoming.value, it->second.e, params.n);
    // Cannot trigger for a unit input; the check mirrors the initiator's setup rule.
    if (bigmod::gcd(out, params.n) == 1) {
      if (state.phase == Phase::kIdle) state.phase = Phase::kRound1Done;
      return {bucket, std::move(out)};
    }
    if (attempt >= kPairRedraws) {
      throw Error(Errc::kCorruptedAccumulator, "round-1 result shares a factor with n");
    }
    it->second = params::gen_exponent_pair(params.phi, member, rng);
  }
}

Accumulator round2_step(ParticipantState& state, const BucketParams& params,
                        const Accumulator& incoming) {
  const auto it = state.pairs.find(params.bucket_id);
  if (it == state.pairs.end()) {
    throw Error(Errc::kProtocolOrder,
                "participant " + std::to_string(state.index) + " has no round-1 pair for bucket " +
                    std::to_string(params.bucket_id));
  }
  require_unit(params, incoming);
  state.phase = Phase::kRound2Done;
  return {params.bucket_id, bigmod::modpow(incoming.value, it->second.d, params.n)};
}

std::size_t extract_count(const BucketParams& params, const Accumulator& final_value) {
  Natural power = params.x % params.n;
  for (std::size_t k = 0; k <= params.ring_size; ++k) {
    if (power == final_value.value) return k;
    power = power * power % params.n;
  }
  throw Error(Errc::kTallyMismatch, "bucket " + std::to_string(params.bucket_id) +
                                        ": final value matches no x^(2^k), k <= " +
                                        std::to_string(params.ring_size));
}

Participant::Participant(std::size_t index, Secret secret, TallySettings settings, std::uint64_t seed)
    : settings_(std::move(settings)), rng_(seed, index) {
  settings_.validate();
  ring_ = settings_.ring();
  const auto it = std::find(ring_.begin(), ring_.end(), index);
  if (it == ring_.end()) {
    throw Error(Errc::kInvalidInput, "participant " + std::to_string(index) + " is not in the ring");
  }
  position_ = static_cast<std::size_t>(it - ring_.begin());
  if (const auto* own = std::get_if<BucketId>(&secret.value)) {
    if (*own < 1 || *own > settings_.bucket_count) {
      throw Error(Errc::kInvalidInput, "participant " + std::to_string(index) + " value " +
                                           std::to_string(*own) + " outside 1.." +
                                           std::to_string(settings_.bucket_count));
    }
  } else if (std::get<std::vector<bool>>(secret.value).size() != settings_.bucket_count) {
    throw Error(Errc::kInvalidInput, "participant " + std::to_string(index) +
                                         " needs one membership bit per bucket");
  }
  state_.index = index;
  state_.secret = std::move(secret);
  expect_ = is_initiator() ? Expect::kStart : Expect::kRound1;
}

void Participant::record_fault(BucketId bucket, const std::string& what) {
  state_.faults.emplace(bucket, what);
}

OutgoingCall Participant::leg_to(std::size_t to, std::uint64_t seq,
                                 std::vector<ProtocolMessage> body) const {
  return {seq, transport::make_leg(index(), to, settings_.ring_size, settings_.bucket_count,
                                   std::move(body))};
}

std::vector<OutgoingCall> Participant::initiate() {
  if (!is_initiator() || expect_ != Expect::kStart) {
    throw Error(Errc::kProtocolOrder, "only a fresh initiator can open round 1");
  }
  std::vector<ProtocolMessage> body;
  for (BucketId b = 1; b <= settings_.bucket_count; ++b) {
    try {
      BucketParams params = params::gen_bucket_params(b, settings_.ring_size, settings_.prime_mode,
                                                      settings_.bits, rng_, settings_.require_jacobi);
      state_.params[b] = params;
      Accumulator acc = round1_step(state_, params, {b, params.x}, rng_);
      body.push_back(ProtocolMessage::r1(b, params.p, params.q, params.x, std::move(acc.value)));
    } catch (const Error& e) {
      record_fault(b, e.what());
    }
  }
  expect_ = Expect::kRound1Closing;
  return {leg_to(successor(), 1, std::move(body))};
}

std::vector<OutgoingCall> Participant::on_leg(const CallLeg& incoming) {
  try {
    transport::validate_leg(incoming);
  } catch (const Error& e) {
    throw Error(Errc::kProtocolOrder, e.what());
  }
  const auto& hello = incoming.messages.front();
  if (hello.payload[1] != static_cast<unsigned long>(settings_.ring_size) ||
      hello.payload[2] != static_cast<unsigned long>(settings_.bucket_count)) {
    throw Error(Errc::kProtocolOrder, "caller announces a different ring or bucket count");
  }

  auto require = [&](std::size_t from, MessageKind kind) {
    if (incoming.from != from) {
      throw Error(Errc::kProtocolOrder, "participant " + std::to_string(index()) +
                                            " expected a call from " + std::to_string(from) +
                                            ", got " + std::to_string(incoming.from));
    }
    for (std::size_t i = 1; i + 1 < incoming.messages.size(); ++i) {
      if (incoming.messages[i].kind != kind) {
        throw Error(Errc::kProtocolOrder, "unexpected " +
                                              std::string(transport::to_string(incoming.messages[i].kind)) +
                                              " line; expected " + std::string(transport::to_string(kind)));
      }
    }
  };

  const auto body = incoming.body();
  switch (expect_) {
    case Expect::kRound1:
      require(predecessor(), MessageKind::kR1);
      return handle_round1(body);
    case Expect::kRound1Closing:
      require(predecessor(), MessageKind::kR1);
      return handle_closing(body);
    case Expect::kRound2:
      require(predecessor(), MessageKind::kR2);
      return handle_round2(body);
    case Expect::kResult:
      require(ring_.back(), MessageKind::kResult);
      handle_result(body);
      return {};
    case Expect::kStart:
    case Expect::kNothing:
      break;
  }
  throw Error(Errc::kProtocolOrder,
              "participant " + std::to_string(index()) + " is not expecting a call now");
}

std::vector<OutgoingCall> Participant::handle_round1(const std::vector<ProtocolMessage>& body) {
  std::vector<ProtocolMessage> out;
  for (const auto& m : body) {
    const BucketId b = *m.bucket;
    try {
      if (b < 1 || b > settings_.bucket_count) throw Error(Errc::kInvalidInput, "bucket id out of range");
      if (m.payload[0] < 2 || m.payload[1] < 2 || m.payload[0] == m.payload[1]) {
        throw Error(Errc::kInvalidInput, "degenerate public primes");
      }
      BucketParams params = params::make_bucket_params(b, m.payload[0], m.payload[1], m.payload[2],
                                                       settings_.ring_size);
      state_.params[b] = params;
      Accumulator acc = round1_step(state_, params, {b, m.acc()}, rng_);
      out.push_back(ProtocolMessage::r1(b, params.p, params.q, params.x, std::move(acc.value)));
    } catch (const Error& e) {
      record_fault(b, e.what());
    }
  }
  expect_ = Expect::kRound2;
  return {leg_to(successor(), position_ + 1, std::move(out))};
}

std::vector<OutgoingCall> Participant::handle_closing(const std::vector<ProtocolMessage>& body) {
  std::vector<ProtocolMessage> out;
  for (const auto& m : body) {
    const BucketId b = *m.bucket;
    try {
      const auto it = state_.params.find(b);
      if (it == state_.params.end()) throw Error(Errc::kProtocolOrder, "bucket was never opened");
      const BucketParams& params = it->second;
      if (m.payload[0] != params.p || m.payload[1] != params.q || m.payload[2] != params.x) {
        throw Error(Errc::kCorruptedAccumulator, "public numbers changed around the ring");
      }
      Accumulator acc = round2_step(state_, params, {b, m.acc()});
      out.push_back(ProtocolMessage::r2(b, std::move(acc.value)));
    } catch (const Error& e) {
      record_fault(b, e.what());
    }
  }
  expect_ = Expect::kResult;
  return {leg_to(successor(), settings_.ring_size + 1, std::move(out))};
}

std::vector<OutgoingCall> Participant::handle_round2(const std::vector<ProtocolMessage>& body) {
  std::vector<ProtocolMessage> out;
  for (const auto& m : body) {
    const BucketId b = *m.bucket;
    try {
      const auto it = state_.params.find(b);
      if (it == state_.params.end()) throw Error(Errc::kProtocolOrder, "no round-1 params for bucket");
      Accumulator acc = round2_step(state_, it->second, {b, m.acc()});
      if (is_extractor()) {
        state_.counts[b] = extract_count(it->second, acc);
      } else {
        out.push_back(ProtocolMessage::r2(b, std::move(acc.value)));
      }
    } catch (const Error& e) {
      record_fault(b, e.what());
    }
  }
  if (!is_extractor()) {
    expect_ = Expect::kResult;
    return {leg_to(successor(), settings_.ring_size + 1 + position_, std::move(out))};
  }
  for (BucketId b = 1; b <= settings_.bucket_count; ++b) {
    if (!state_.counts.contains(b) && !state_.faults.contains(b)) {
      record_fault(b, "no round-2 value arrived");
    }
  }
  expect_ = Expect::kNothing;
  return announce();
}

std::vector<OutgoingCall> Participant::announce() {
  std::vector<ProtocolMessage> body;
  for (const auto& [b, k] : state_.counts) body.push_back(ProtocolMessage::result(b, k));
  const std::size_t first = 2 * settings_.ring_size;
  if (settings_.announce == AnnounceMode::kBroadcast) {
    return {leg_to(transport::kBroadcast, first, std::move(body))};
  }
  std::vector<OutgoingCall> calls;
  for (std::size_t j = 0; j + 1 < ring_.size(); ++j) calls.push_back(leg_to(ring_[j], first + j, body));
  return calls;
}

void Participant::handle_result(const std::vector<ProtocolMessage>& body) {
  for (const auto& m : body) {
    const BucketId b = *m.bucket;
    if (m.payload[0] > static_cast<unsigned long>(settings_.ring_size)) {
      record_fault(b, "announced count exceeds ring size");
      continue;
    }
    state_.counts[b] = m.payload[0].get_ui();
  }
  expect_ = Expect::kNothing;
}

std::vector<Participant> make_participants(const TallySettings& settings,
                                           const std::vector<Secret>& secrets, std::uint64_t seed) {
  if (secrets.size() != settings.ring_size) {
    throw Error(Errc::kInvalidInput, "expected " + std::to_string(settings.ring_size) +
                                         " secrets, got " + std::to_string(secrets.size()));
  }
  std::vector<Participant> out;
  out.reserve(secrets.size());
  for (std::size_t i = 0; i < secrets.size(); ++i) out.emplace_back(i + 1, secrets[i], settings, seed);
  return out;
}

TallyOutcome run_tally(std::vector<Participant>& participants, transport::Transport& transport) {
  if (participants.size() < 2) throw Error(Errc::kInvalidInput, "ring needs at least two participants");
  std::map<std::size_t, Participant*> by_index;
  Participant* initiator = nullptr;
  Participant* extractor = nullptr;
  for (auto& p : participants) {
    by_index[p.index()] = &p;
    if (p.is_initiator()) initiator = &p;
    if (p.is_extractor()) extractor = &p;
  }
  const TallySettings& settings = initiator->settings();

  auto send = [&](const OutgoingCall& call) {
    const std::uint64_t seq = transport.send_call(call.leg);
    if (seq != call.seq) {
      throw Error(Errc::kProtocolOrder, "call " + std::to_string(seq) + " left out of order (expected " +
                                            std::to_string(call.seq) + ")");
    }
  };

  for (const auto& call : initiator->initiate()) send(call);
  while (auto delivery = transport.poll()) {
    const auto it = by_index.find(delivery->recipient);
    if (it == by_index.end()) {
      throw Error(Errc::kTransport, "leg addressed to unknown participant " + std::to_string(delivery->recipient));
    }
    for (const auto& call : it->second->on_leg(delivery->leg)) send(call);
  }

  TallyOutcome outcome;
  outcome.transcript = transport.transcript();
  outcome.result.counts = extractor->state().counts;
  for (const std::size_t index : settings.ring()) {
    for (const auto& [b, what] : by_index[index]->state().faults) outcome.result.faults.emplace(b, what);
  }
  const std::size_t protocol_legs = protocol_call_count(settings.ring_size);
  for (const auto& recorded : outcome.transcript.legs()) {
    if (recorded.seq <= protocol_legs) {
      ++outcome.result.protocol_calls;
    } else {
      ++outcome.result.announce_calls;
    }
  }
  return outcome;
}

TallyOutcome run_tally(const TallySettings& settings, const std::vector<Secret>& secrets,
                       std::uint64_t seed) {
  auto participants = make_participants(settings, secrets, seed);
  transport::InMemoryTransport transport(settings.ring());
  return run_tally(participants, transport);
}

}  // namespace ringtally::protocol
