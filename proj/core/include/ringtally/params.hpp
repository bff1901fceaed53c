#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <string_view>

#include "ringtally/bigmod.hpp"
#include "ringtally/rng.hpp"

namespace ringtally {

using BucketId = std::uint32_t;

namespace params {

/// Public numbers the initiator fixes for one bucket.
struct BucketParams {
  BucketId bucket_id = 0;
  Natural p;
  Natural q;
  Natural n;    // p * q
  Natural phi;  // (p - 1) * (q - 1)
  Natural x;
  std::size_t ring_size = 0;

  friend bool operator==(const BucketParams&, const BucketParams&) = default;
};

/// One participant's secret exponents for one bucket: e * d = w (mod phi),
/// with w = 2 for a member and 1 otherwise.
struct ExponentPair {
  Natural e;
  Natural d;
  bool member = false;

  unsigned w() const { return member ? 2u : 1u; }

  friend bool operator==(const ExponentPair&, const ExponentPair&) = default;
};

enum class PrimeMode { kFermat, kRandom };

std::string_view to_string(PrimeMode mode);

inline constexpr std::array<unsigned, 5> kFermatPrimes{3, 5, 17, 257, 65537};
inline constexpr std::size_t kSelectXBudget = 4096;
inline constexpr std::size_t kExponentPairBudget = 10'000;
inline constexpr unsigned kDefaultModulusBits = 64;
/// Largest ring a pair of known Fermat primes can serve: v2(65537 - 1) = 16.
inline constexpr std::size_t kMaxFermatRing = 15;

/// Assembles params from public values, deriving n and phi.
BucketParams make_bucket_params(BucketId bucket, Natural p, Natural q, Natural x,
                                std::size_t ring_size);

/// True when gcd(x, n) = 1 and x^(2^k) mod n, k = 0..ring_size, are pairwise
/// distinct and never 1. With `require_jacobi` the candidate must also have
/// Jacobi symbol +1 modulo n.
bool is_valid_x(const Natural& x, const Natural& p, const Natural& q, std::size_t ring_size,
                bool require_jacobi);

/// Random search in [2, n - 2] for an x passing is_valid_x. Throws
/// Errc::kUnsatisfiable after kSelectXBudget rejected candidates.
Natural select_x(const Natural& p, const Natural& q, std::size_t ring_size, Rng& rng,
                 bool require_jacobi = true);

/// Fermat mode picks (p, q) among the known Fermat primes; random mode draws
/// p = 1 (mod 2^(ring_size + 1)) with bits/2 bits and an odd prime q with the
/// remaining bits. Either way x comes from select_x.
BucketParams gen_bucket_params(BucketId bucket, std::size_t ring_size, PrimeMode mode,
                               unsigned bits, Rng& rng, bool require_jacobi = true);

/// Checks every BucketParams invariant; throws Errc::kInvalidInput naming the
/// first violation.
void check_bucket_params(const BucketParams& params, bool require_jacobi = false);

/// Pair for a given encryption exponent; d = w * e^-1 mod phi (phi added when
/// that is 0). Throws kNotInvertible if gcd(e, phi) != 1.
ExponentPair make_exponent_pair(const Natural& e, const Natural& phi, bool member);

/// Odd e uniform in [3, phi) with gcd(e, phi) = 1. phi must be even and >= 8.
ExponentPair gen_exponent_pair(const Natural& phi, bool member, Rng& rng);

}  // namespace params
}  // namespace ringtally
