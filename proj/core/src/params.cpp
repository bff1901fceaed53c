#include "ringtally/params.hpp"

#include <algorithm>
#include <string>
#include <utility>
#include <vector>

#include "ringtally/error.hpp"

namespace ringtally::params {

using bigmod::gcd;
using bigmod::modpow;

std::string_view to_string(PrimeMode mode) {
  return mode == PrimeMode::kFermat ? "fermat" : "random";
}

BucketParams make_bucket_params(BucketId bucket, Natural p, Natural q, Natural x,
                                std::size_t ring_size) {
  BucketParams out;
  out.bucket_id = bucket;
  out.n = p * q;
  out.phi = (p - 1) * (q - 1);
  out.p = std::move(p);
  out.q = std::move(q);
  out.x = std::move(x);
  out.ring_size = ring_size;
  return out;
}

bool is_valid_x(const Natural& x, const Natural& p, const Natural& q, std::size_t ring_size,
                bool require_jacobi) {
  const Natural n = p * q;
  if (x < 2 || x > n - 2) return false;
  if (gcd(x, n) != 1) return false;
  if (require_jacobi && bigmod::jacobi(x, n) != 1) return false;

  std::vector<Natural> powers;
  powers.reserve(ring_size + 1);
  Natural power = x;
  for (std::size_t k = 0; k <= ring_size; ++k) {
    if (power == 1) return false;
    powers.push_back(power);
    power = power * power % n;
  }
  std::sort(powers.begin(), powers.end());
  return std::adjacent_find(powers.begin(), powers.end()) == powers.end();
}

Natural select_x(const Natural& p, const Natural& q, std::size_t ring_size, Rng& rng,
                 bool require_jacobi) {
  if (p == q) throw Error(Errc::kInvalidInput, "p and q must differ");
  const Natural n = p * q;
  if (n < 5) throw Error(Errc::kInvalidInput, "modulus too small to choose x");
  for (std::size_t attempt = 0; attempt < kSelectXBudget; ++attempt) {
    Natural candidate = rng.between(2, n - 2);
    if (is_valid_x(candidate, p, q, ring_size, require_jacobi)) return candidate;
  }
  throw Error(Errc::kUnsatisfiable,
              "no x with " + std::to_string(ring_size + 1) + " distinct repeated squares mod " +
                  n.get_str() + " found in " + std::to_string(kSelectXBudget) + " attempts");
}

namespace {

std::pair<Natural, Natural> pick_fermat_pair(std::size_t ring_size, Rng& rng) {
  if (ring_size > kMaxFermatRing) {
    throw Error(Errc::kUnsatisfiable,
                "Fermat primes reach 2-adic order 2^16 at most; a ring of " +
                    std::to_string(ring_size) + " needs 2^" + std::to_string(ring_size + 1));
  }
  std::vector<std::pair<unsigned, unsigned>> usable;
  for (std::size_t i = 0; i < kFermatPrimes.size(); ++i) {
    for (std::size_t j = i + 1; j < kFermatPrimes.size(); ++j) {
      const unsigned vp = bigmod::two_adic_valuation(Natural(kFermatPrimes[i] - 1));
      const unsigned vq = bigmod::two_adic_valuation(Natural(kFermatPrimes[j] - 1));
      if (std::max(vp, vq) >= ring_size + 1) usable.emplace_back(kFermatPrimes[i], kFermatPrimes[j]);
    }
  }
  const auto pick = usable[rng.below(usable.size()).get_ui()];
  return {Natural(pick.first), Natural(pick.second)};
}

std::pair<Natural, Natural> pick_random_pair(std::size_t ring_size, unsigned bits, Rng& rng) {
  const unsigned p_bits = bits / 2;
  const unsigned q_bits = bits - p_bits;
  if (p_bits < 8) throw Error(Errc::kInvalidInput, "modulus needs at least 16 bits");
  Natural two_power;
  mpz_ui_pow_ui(two_power.get_mpz_t(), 2, ring_size + 1);
  Natural p = bigmod::random_prime(p_bits, 1, two_power, rng);
  for (;;) {
    Natural q = bigmod::random_prime(q_bits, 1, 2, rng);
    if (q != p) return {std::move(p), std::move(q)};
  }
}

}  // namespace

BucketParams gen_bucket_params(BucketId bucket, std::size_t ring_size, PrimeMode mode,
                               unsigned bits, Rng& rng, bool require_jacobi) {
  if (ring_size < 2) throw Error(Errc::kInvalidInput, "ring needs at least two participants");
  auto [p, q] = mode == PrimeMode::kFermat ? pick_fermat_pair(ring_size, rng)
                                           : pick_random_pair(ring_size, bits, rng);
  Natural x = select_x(p, q, ring_size, rng, require_jacobi);
  return make_bucket_params(bucket, std::move(p), std::move(q), std::move(x), ring_size);
}

void check_bucket_params(const BucketParams& params, bool require_jacobi) {
  auto fail = [&](const std::string& why) {
    throw Error(Errc::kInvalidInput, "bucket " + std::to_string(params.bucket_id) + ": " + why);
  };
  if (params.p == params.q) fail("p == q");
  if (!bigmod::is_probable_prime(params.p)) fail("p is not prime");
  if (!bigmod::is_probable_prime(params.q)) fail("q is not prime");
  if (params.n != params.p * params.q) fail("n != p*q");
  if (params.phi != (params.p - 1) * (params.q - 1)) fail("phi != (p-1)(q-1)");
  if (!is_valid_x(params.x, params.p, params.q, params.ring_size, require_jacobi)) {
    fail("x violates the repeated-squaring distinctness condition");
  }
}

ExponentPair make_exponent_pair(const Natural& e, const Natural& phi, bool member) {
  const Natural inverse = bigmod::modinv(e, phi);
  Natural d = (member ? 2 * inverse : inverse) % phi;
  if (d == 0) d = phi;
  return ExponentPair{e, std::move(d), member};
}

ExponentPair gen_exponent_pair(const Natural& phi, bool member, Rng& rng) {
  if (phi < 8 || mpz_odd_p(phi.get_mpz_t())) {
    throw Error(Errc::kInvalidInput, "phi must be even and at least 8, got " + phi.get_str());
  }
  // Odd values in [3, phi): 3, 5, ..., phi - 1.
  const Natural odd_count = (phi - 2) / 2;
  for (std::size_t attempt = 0; attempt < kExponentPairBudget; ++attempt) {
    const Natural e = 3 + 2 * rng.below(odd_count);
    if (gcd(e, phi) == 1) return make_exponent_pair(e, phi, member);
  }
  throw Error(Errc::kSearchFailed, "no exponent coprime to " + phi.get_str());
}

}  // namespace ringtally::params
