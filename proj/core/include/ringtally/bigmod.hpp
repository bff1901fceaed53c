#pragma once

#include <cstddef>
#include <cstdint>

#include <gmpxx.h>

#include "ringtally/rng.hpp"

namespace ringtally {

/// Arbitrary-precision magnitude. Every Natural handed across the library
/// boundary is nonnegative; parsers reject signs.
using Natural = mpz_class;

namespace bigmod {

inline constexpr unsigned kDefaultMillerRabinRounds = 32;
inline constexpr std::uint64_t kTrialDivisionLimit = 1'000'000;

/// base^exponent mod modulus. Throws Errc::kInvalidModulus when modulus < 2.
Natural modpow(const Natural& base, const Natural& exponent, const Natural& modulus);

Natural gcd(const Natural& a, const Natural& b);

/// Inverse of a modulo m by extended Euclid, in (0, m).
/// Throws kInvalidModulus (m < 2) or kNotInvertible (gcd(a, m) != 1).
Natural modinv(const Natural& a, const Natural& m);

/// Jacobi symbol (a|n) for odd n >= 3. Throws kInvalidInput otherwise.
int jacobi(const Natural& a, const Natural& n);

/// Trial division below kTrialDivisionLimit, Miller-Rabin with `rounds`
/// random bases above it.
bool is_probable_prime(const Natural& n, Rng& rng, unsigned rounds = kDefaultMillerRabinRounds);

/// Convenience overload: bases come from a generator seeded by n itself, so
/// the answer is a pure function of (n, rounds).
bool is_probable_prime(const Natural& n, unsigned rounds = kDefaultMillerRabinRounds);

/// Prime with exactly `bits` bits and p = residue (mod modulus). Samples at
/// most 50 * bits candidates from the arithmetic progression, then throws
/// kSearchFailed. Also throws kSearchFailed when the progression has no
/// member of the requested bit length.
Natural random_prime(unsigned bits, const Natural& residue, const Natural& modulus, Rng& rng);

/// 2-adic valuation; v2(0) is defined as 0.
unsigned two_adic_valuation(const Natural& a);

std::size_t bit_length(const Natural& a);

}  // namespace bigmod
}  // namespace ringtally
