#include "ringtally/bigmod.hpp"

#include <utility>

#include "ringtally/error.hpp"

namespace ringtally::bigmod {

namespace {

void require_modulus(const Natural& m) {
  if (m < 2) throw Error(Errc::kInvalidModulus, "modulus must be at least 2, got " + m.get_str());
}

bool trial_division_prime(std::uint64_t n) {
  if (n < 2) return false;
  if (n % 2 == 0) return n == 2;
  for (std::uint64_t d = 3; d * d <= n; d += 2) {
    if (n % d == 0) return false;
  }
  return true;
}

bool miller_rabin(const Natural& n, Rng& rng, unsigned rounds) {
  const Natural n_minus_1 = n - 1;
  Natural odd = n_minus_1;
  unsigned s = 0;
  while (mpz_even_p(odd.get_mpz_t())) {
    odd >>= 1;
    ++s;
  }
  Natural x;
  for (unsigned round = 0; round < rounds; ++round) {
    const Natural a = rng.between(2, n - 2);
    mpz_powm(x.get_mpz_t(), a.get_mpz_t(), odd.get_mpz_t(), n.get_mpz_t());
    if (x == 1 || x == n_minus_1) continue;
    bool witness = true;
    for (unsigned i = 1; i < s; ++i) {
      x = x * x % n;
      if (x == n_minus_1) {
        witness = false;
        break;
      }
    }
    if (witness) return false;
  }
  return true;
}

}  // namespace

Natural modpow(const Natural& base, const Natural& exponent, const Natural& modulus) {
  require_modulus(modulus);
  if (exponent < 0) throw Error(Errc::kInvalidInput, "negative exponent");
  Natural out;
  mpz_powm(out.get_mpz_t(), base.get_mpz_t(), exponent.get_mpz_t(), modulus.get_mpz_t());
  return out;
}

Natural gcd(const Natural& a, const Natural& b) {
  Natural out;
  mpz_gcd(out.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return out;
}

Natural modinv(const Natural& a, const Natural& m) {
  require_modulus(m);
  // Invariant: old_r = old_s * a (mod m), r = s * a (mod m).
  Natural old_r = a % m;
  Natural r = m;
  Natural old_s = 1;
  Natural s = 0;
  while (r != 0) {
    const Natural quotient = old_r / r;
    Natural next_r = old_r - quotient * r;
    Natural next_s = old_s - quotient * s;
    old_r = std::exchange(r, std::move(next_r));
    old_s = std::exchange(s, std::move(next_s));
  }
  if (old_r != 1) {
    throw Error(Errc::kNotInvertible, a.get_str() + " has no inverse modulo " + m.get_str());
  }
  Natural t = old_s % m;
  if (t < 0) t += m;
  return t;
}

int jacobi(const Natural& a, const Natural& n) {
  if (n < 3 || mpz_even_p(n.get_mpz_t())) {
    throw Error(Errc::kInvalidInput, "jacobi symbol needs an odd modulus >= 3, got " + n.get_str());
  }
  Natural top = a % n;
  Natural bottom = n;
  int sign = 1;
  while (top != 0) {
    while (mpz_even_p(top.get_mpz_t())) {
      top >>= 1;
      const unsigned long r8 = mpz_fdiv_ui(bottom.get_mpz_t(), 8);
      if (r8 == 3 || r8 == 5) sign = -sign;
    }
    std::swap(top, bottom);
    if (mpz_fdiv_ui(top.get_mpz_t(), 4) == 3 && mpz_fdiv_ui(bottom.get_mpz_t(), 4) == 3) sign = -sign;
    top %= bottom;
  }
  return bottom == 1 ? sign : 0;
}

bool is_probable_prime(const Natural& n, Rng& rng, unsigned rounds) {
  if (rounds == 0) throw Error(Errc::kInvalidInput, "Miller-Rabin needs at least one round");
  if (n < kTrialDivisionLimit) {
    if (n < 2) return false;
    return trial_division_prime(n.get_ui());
  }
  if (mpz_even_p(n.get_mpz_t())) return false;
  for (unsigned long small : {3ul, 5ul, 7ul, 11ul, 13ul, 17ul, 19ul, 23ul, 29ul, 31ul, 37ul}) {
    if (mpz_divisible_ui_p(n.get_mpz_t(), small)) return false;
  }
  return miller_rabin(n, rng, rounds);
}

bool is_probable_prime(const Natural& n, unsigned rounds) {
  Rng rng(mpz_fdiv_ui(n.get_mpz_t(), 0xFFFFFFFFul), bit_length(n));
  return is_probable_prime(n, rng, rounds);
}

Natural random_prime(unsigned bits, const Natural& residue, const Natural& modulus, Rng& rng) {
  if (bits < 2) throw Error(Errc::kInvalidInput, "random_prime needs at least 2 bits");
  if (modulus < 1) throw Error(Errc::kInvalidInput, "random_prime congruence modulus must be positive");
  Natural r = residue % modulus;
  if (r < 0) r += modulus;

  Natural lo;
  Natural hi;
  mpz_ui_pow_ui(lo.get_mpz_t(), 2, bits - 1);
  hi = 2 * lo - 1;
  if (hi < r) {
    throw Error(Errc::kSearchFailed, "no " + std::to_string(bits) + "-bit number is congruent to " +
                                         r.get_str() + " mod " + modulus.get_str());
  }
  // Candidates are r + t * modulus with t in [t_min, t_max].
  Natural t_min = 0;
  if (lo > r) {
    const Natural gap = lo - r;
    mpz_cdiv_q(t_min.get_mpz_t(), gap.get_mpz_t(), modulus.get_mpz_t());
  }
  Natural t_max;
  const Natural span = hi - r;
  mpz_fdiv_q(t_max.get_mpz_t(), span.get_mpz_t(), modulus.get_mpz_t());
  if (t_min > t_max) {
    throw Error(Errc::kSearchFailed, "no " + std::to_string(bits) + "-bit number is congruent to " +
                                         r.get_str() + " mod " + modulus.get_str());
  }

  const unsigned budget = 50 * bits;
  for (unsigned attempt = 0; attempt < budget; ++attempt) {
    Natural candidate = r + rng.between(t_min, t_max) * modulus;
    if (is_probable_prime(candidate, rng)) return candidate;
  }
  throw Error(Errc::kSearchFailed,
              "no prime found after " + std::to_string(budget) + " candidates");
}

unsigned two_adic_valuation(const Natural& a) {
  if (a == 0) return 0;
  return static_cast<unsigned>(mpz_scan1(a.get_mpz_t(), 0));
}

std::size_t bit_length(const Natural& a) {
  if (a == 0) return 0;
  return mpz_sizeinbase(a.get_mpz_t(), 2);
}

}  // namespace ringtally::bigmod
