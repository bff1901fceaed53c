#pragma once

#include <cstdint>
#include <random>

#include <gmpxx.h>

namespace ringtally {

/// Seeded source for every random draw in the library. Two instances built
/// from the same (seed, stream) pair produce identical sequences on every
/// platform, since both std::seed_seq and std::mt19937_64 are fully specified.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform in [0, 2^bits).
  mpz_class bits(unsigned bits);
  /// Uniform in [0, bound); bound must be positive.
  mpz_class below(const mpz_class& bound);
  /// Uniform in [lo, hi]; requires lo <= hi.
  mpz_class between(const mpz_class& lo, const mpz_class& hi);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ringtally
