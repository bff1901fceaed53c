#pragma once

// Slow reference implementations on machine words, sharing no code with the
// library. Only meant for small operands.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <random>
#include <set>
#include <sstream>
#include <string>

namespace oracle {

inline std::uint64_t mulmod(std::uint64_t a, std::uint64_t b, std::uint64_t m) {
  return static_cast<std::uint64_t>(static_cast<unsigned __int128>(a) * b % m);
}

// Repeated multiplication, one step per unit of exponent.
inline std::uint64_t pow_iter(std::uint64_t base, std::uint64_t exp, std::uint64_t m) {
  std::uint64_t r = 1 % m;
  for (std::uint64_t i = 0; i < exp; ++i) r = mulmod(r, base % m, m);
  return r;
}

inline std::uint64_t gcd_sub(std::uint64_t a, std::uint64_t b) {
  if (a == 0) return b;
  if (b == 0) return a;
  while (a != b) {
    if (a > b) a -= b; else b -= a;
  }
  return a;
}

inline bool prime_trial(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

// Inverse by exhaustive search; 0 when none.
inline std::uint64_t inverse_search(std::uint64_t a, std::uint64_t m) {
  for (std::uint64_t t = 1; t < m; ++t)
    if (mulmod(a, t, m) == 1 % m) return t;
  return 0;
}

// Legendre symbol from the set of nonzero squares mod p.
inline int legendre_enum(std::uint64_t a, std::uint64_t p) {
  a %= p;
  if (a == 0) return 0;
  for (std::uint64_t y = 1; y < p; ++y)
    if (y * y % p == a) return 1;
  return -1;
}

// Smallest positive t with g^t = 1, by stepping.
inline std::uint64_t order_iter(std::uint64_t g, std::uint64_t m) {
  std::uint64_t v = g % m;
  for (std::uint64_t t = 1; t <= m; ++t) {
    if (v == 1) return t;
    v = mulmod(v, g, m);
  }
  return 0;
}

}  // namespace oracle

namespace testutil {

inline std::filesystem::path scratch_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("ringtally-" + name + "-" + std::to_string(std::random_device{}()));
  std::filesystem::create_directories(dir);
  return dir;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream(path, std::ios::binary) << text;
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace testutil
