#include "ringtally/rng.hpp"

#include <vector>

#include "ringtally/error.hpp"

namespace ringtally {

Rng::Rng(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  engine_.seed(seq);
}

mpz_class Rng::bits(unsigned bits) {
  mpz_class out;
  if (bits == 0) return out;
  std::vector<std::uint64_t> words((bits + 63) / 64);
  for (auto& w : words) w = engine_();
  if (unsigned extra = bits % 64; extra != 0) words.back() &= (std::uint64_t{1} << extra) - 1;
  mpz_import(out.get_mpz_t(), words.size(), -1, sizeof(std::uint64_t), 0, 0, words.data());
  return out;
}

mpz_class Rng::below(const mpz_class& bound) {
  if (bound <= 0) throw Error(Errc::kInvalidInput, "Rng::below requires a positive bound");
  if (bound == 1) return 0;
  mpz_class top = bound - 1;
  const auto width = static_cast<unsigned>(mpz_sizeinbase(top.get_mpz_t(), 2));
  for (;;) {
    mpz_class r = bits(width);
    if (r < bound) return r;
  }
}

mpz_class Rng::between(const mpz_class& lo, const mpz_class& hi) {
  if (lo > hi) throw Error(Errc::kInvalidInput, "Rng::between requires lo <= hi");
  return lo + below(hi - lo + 1);
}

}  // namespace ringtally
