#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "ringtally/bigmod.hpp"
#include "ringtally/params.hpp"
#include "ringtally/protocol.hpp"
#include "ringtally/transcript.hpp"

namespace ringtally::analysis {

/// Direct count with no privacy at all.
std::size_t oracle_count(const std::vector<protocol::Secret>& secrets, BucketId bucket);

struct LogResult {
  std::optional<Natural> exponent;
  std::uint64_t work = 0;  // group multiplications
};

/// Smallest t <= max_steps with g^t = h (mod n); no exponent when none.
LogResult discrete_log_bruteforce(const Natural& g, const Natural& h, const Natural& n,
                                  std::uint64_t max_steps);

struct PowerOfTwoLog {
  Natural exponent;  // reduced modulo order
  Natural order;     // ord(g) mod n, a power of two
  std::uint64_t work = 0;
};

/// Pohlig-Hellman for elements whose order modulo p and modulo q is a power of
/// two: lifts t one bit at a time in each prime field and recombines.
/// Throws Errc::kInvalidInput when n != p*q or the order is not 2-smooth, and
/// kNoSolution when h is not in <g>.
PowerOfTwoLog pohlig_hellman_pow2(const Natural& g, const Natural& h, const Natural& n,
                                  const Natural& p, const Natural& q);

/// ord(g) in (Z/pqZ)*, factoring p-1 and q-1 by trial division.
Natural multiplicative_order(const Natural& g, const Natural& p, const Natural& q);

enum class InferredBit { kMember, kNonmember, kInconclusive };

const char* to_string(InferredBit bit);

struct AttackOutcome {
  std::size_t target = 0;
  InferredBit inferred = InferredBit::kInconclusive;
  std::uint64_t work = 0;
  std::string method;
};

/// Public params of a bucket as announced in its first round-1 line.
params::BucketParams params_from_transcript(const transport::Transcript& transcript, BucketId bucket);

/// The colluders' attempt on one bucket. When everyone but the target
/// colludes and the count was announced, the bit is the count minus the
/// colluders' own bits. Otherwise the target must sit between two colluders;
/// its exponents are recovered from its round-1 and round-2 input/output
/// pairs (Pohlig-Hellman when p-1 and q-1 are powers of two, brute force
/// within `dl_budget` steps otherwise), and the bit is read off the group
/// equation y^(e*d) = y^w on the target's round-2 input y.
/// Throws Errc::kMissingData when the transcript lacks a needed line,
/// kInvalidInput when the coalition does not surround the target.
AttackOutcome collusion_attack(const transport::Transcript& transcript,
                               const std::set<std::size_t>& colluders, std::size_t target,
                               const params::BucketParams& params, std::uint64_t dl_budget,
                               const std::map<std::size_t, protocol::Secret>& colluder_secrets = {});

struct ProbeResult {
  /// Index of the first member in ring order, when the parity channel is open.
  std::optional<std::size_t> first_member;
  /// Jacobi symbol of every round-2 output visible in the transcript, in ring order.
  std::vector<int> round2_symbols;
  bool channel_open = false;  // jacobi(x, n) = -1
};

/// Eavesdropper diagnostic: jacobi(m^d, n) = jacobi(m, n)^d and d is even
/// exactly for members, so with jacobi(x, n) = -1 the round-2 symbols flip
/// from -1 to +1 at the first member.
ProbeResult jacobi_probe(const transport::Transcript& transcript, const params::BucketParams& params);

}  // namespace ringtally::analysis
