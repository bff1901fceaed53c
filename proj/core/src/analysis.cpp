#include "ringtally/analysis.hpp"

#include <algorithm>
#include <utility>

#include "ringtally/error.hpp"

namespace ringtally::analysis {

using bigmod::modpow;
using transport::MessageKind;
using transport::Transcript;

std::size_t oracle_count(const std::vector<protocol::Secret>& secrets, BucketId bucket) {
  return static_cast<std::size_t>(std::count_if(
      secrets.begin(), secrets.end(), [&](const protocol::Secret& s) { return s.is_member(bucket); }));
}

LogResult discrete_log_bruteforce(const Natural& g, const Natural& h, const Natural& n,
                                  std::uint64_t max_steps) {
  LogResult out;
  const Natural target = h % n;
  Natural power = 1 % n;
  const Natural base = g % n;
  for (std::uint64_t t = 0;; ++t) {
    if (power == target) {
      out.exponent = Natural(static_cast<unsigned long>(t));
      return out;
    }
    if (t >= max_steps) return out;
    power = power * base % n;
    ++out.work;
  }
}

namespace {

struct PrimeLog {
  Natural exponent;
  unsigned order_log2 = 0;
};

PrimeLog log_mod_prime(const Natural& g_in, const Natural& h_in, const Natural& prime,
                       std::uint64_t& work) {
  const Natural g = g_in % prime;
  const Natural h = h_in % prime;
  if (g == 0) throw Error(Errc::kInvalidInput, "base divisible by " + prime.get_str());

  unsigned a = 0;
  const std::size_t cap = bigmod::bit_length(prime);
  for (Natural y = g; y != 1; y = y * y % prime) {
    ++work;
    if (++a > cap) {
      throw Error(Errc::kInvalidInput, "order of base modulo " + prime.get_str() + " is not a power of two");
    }
  }

  // Invariant: cur = h * g^-t with t holding the bits found so far.
  Natural t = 0;
  Natural cur = h;
  Natural step = bigmod::modinv(g, prime);  // g^-(2^i)
  for (unsigned i = 0; i < a; ++i) {
    Natural z = cur;
    for (unsigned j = i + 1; j < a; ++j) {
      z = z * z % prime;
      ++work;
    }
    if (z != 1) {
      t += Natural(1) << i;
      cur = cur * step % prime;
      ++work;
    }
    step = step * step % prime;
    ++work;
  }
  if (cur != 1) throw Error(Errc::kNoSolution, "target is not a power of the base modulo " + prime.get_str());
  return {std::move(t), a};
}

bool is_power_of_two(const Natural& v) { return v > 0 && mpz_popcount(v.get_mpz_t()) == 1; }

std::vector<Natural> prime_factors(Natural m) {
  std::vector<Natural> factors;
  for (unsigned long d = 2; Natural(d) * d <= m; d += (d == 2 ? 1 : 2)) {
    if (mpz_divisible_ui_p(m.get_mpz_t(), d)) {
      factors.emplace_back(d);
      while (mpz_divisible_ui_p(m.get_mpz_t(), d)) m /= d;
    }
    if (d > (1ul << 32)) throw Error(Errc::kInvalidInput, "cofactor too large to factor by trial division");
  }
  if (m > 1) factors.push_back(m);
  return factors;
}

Natural order_mod_prime(const Natural& g, const Natural& prime) {
  Natural order = prime - 1;
  for (const auto& f : prime_factors(order)) {
    while (mpz_divisible_p(order.get_mpz_t(), f.get_mpz_t()) && modpow(g, order / f, prime) == 1) {
      order /= f;
    }
  }
  return order;
}

}  // namespace

PowerOfTwoLog pohlig_hellman_pow2(const Natural& g, const Natural& h, const Natural& n,
                                  const Natural& p, const Natural& q) {
  if (p * q != n) throw Error(Errc::kInvalidInput, "n must equal p*q");
  PowerOfTwoLog out;
  const PrimeLog mod_p = log_mod_prime(g, h, p, out.work);
  const PrimeLog mod_q = log_mod_prime(g, h, q, out.work);

  const unsigned low = std::min(mod_p.order_log2, mod_q.order_log2);
  const Natural low_mask = (Natural(1) << low) - 1;
  if ((mod_p.exponent & low_mask) != (mod_q.exponent & low_mask)) {
    throw Error(Errc::kNoSolution, "logs modulo p and q are incompatible");
  }
  const bool p_dominates = mod_p.order_log2 >= mod_q.order_log2;
  out.exponent = p_dominates ? mod_p.exponent : mod_q.exponent;
  out.order = Natural(1) << (p_dominates ? mod_p.order_log2 : mod_q.order_log2);
  return out;
}

Natural multiplicative_order(const Natural& g, const Natural& p, const Natural& q) {
  if (bigmod::gcd(g, p * q) != 1) throw Error(Errc::kInvalidInput, "element is not a unit");
  const Natural op = order_mod_prime(g % p, p);
  const Natural oq = order_mod_prime(g % q, q);
  Natural out;
  mpz_lcm(out.get_mpz_t(), op.get_mpz_t(), oq.get_mpz_t());
  return out;
}

const char* to_string(InferredBit bit) {
  switch (bit) {
    case InferredBit::kMember: return "member";
    case InferredBit::kNonmember: return "nonmember";
    case InferredBit::kInconclusive: return "inconclusive";
  }
  return "?";
}

namespace {

/// Read-only helpers over the fixed call order: round-1 calls are seq 1..N,
/// round-2 calls N+1..2N-1, announcements after that.
class ChainView {
 public:
  explicit ChainView(const Transcript& transcript) : transcript_(transcript) {
    if (transcript.empty()) throw Error(Errc::kMissingData, "empty transcript");
    ring_size_ = transcript.legs().front().leg.messages.front().payload[1].get_ui();
    for (std::uint64_t seq = 1; seq <= ring_size_; ++seq) {
      const auto* rec = transcript.find(seq);
      if (rec == nullptr) throw Error(Errc::kMissingData, "round-1 call " + std::to_string(seq) + " missing");
      ring_.push_back(rec->leg.from);
    }
  }

  const std::vector<std::size_t>& ring() const { return ring_; }
  std::size_t ring_size() const { return ring_size_; }

  std::size_t position_of(std::size_t index) const {
    const auto it = std::find(ring_.begin(), ring_.end(), index);
    if (it == ring_.end()) throw Error(Errc::kInvalidInput, "participant " + std::to_string(index) + " not in ring");
    return static_cast<std::size_t>(it - ring_.begin());
  }

  /// Accumulator in call `seq` for `bucket`, nullopt when absent.
  std::optional<Natural> acc(std::uint64_t seq, BucketId bucket, MessageKind kind) const {
    const auto* rec = transcript_.find(seq);
    if (rec == nullptr) return std::nullopt;
    for (const auto& m : rec->leg.messages) {
      if (m.kind == kind && m.bucket == bucket) return m.acc();
    }
    return std::nullopt;
  }

  std::optional<std::size_t> announced(BucketId bucket) const {
    for (const auto& rec : transcript_.legs()) {
      if (rec.seq <= protocol::protocol_call_count(ring_size_)) continue;
      for (const auto& m : rec.leg.messages) {
        if (m.kind == MessageKind::kResult && m.bucket == bucket) return m.payload[0].get_ui();
      }
    }
    return std::nullopt;
  }

  /// Value the participant at `position` received in round 1.
  std::optional<Natural> round1_in(std::size_t position, BucketId b, const Natural& x) const {
    return position == 0 ? std::optional<Natural>(x) : acc(position, b, MessageKind::kR1);
  }
  std::optional<Natural> round1_out(std::size_t position, BucketId b) const {
    return acc(position + 1, b, MessageKind::kR1);
  }
  std::optional<Natural> round2_in(std::size_t position, BucketId b) const {
    return position == 0 ? acc(ring_size_, b, MessageKind::kR1) : acc(ring_size_ + position, b, MessageKind::kR2);
  }
  /// The extractor's output never travels, but it equals x^(2^count).
  std::optional<Natural> round2_out(std::size_t position, BucketId b, const params::BucketParams& params) const {
    if (position + 1 < ring_size_) return acc(ring_size_ + 1 + position, b, MessageKind::kR2);
    const auto count = announced(b);
    if (!count) return std::nullopt;
    return modpow(params.x, Natural(1) << *count, params.n);
  }

 private:
  const Transcript& transcript_;
  std::size_t ring_size_ = 0;
  std::vector<std::size_t> ring_;
};

Natural need(const std::optional<Natural>& v, const std::string& what) {
  if (!v) throw Error(Errc::kMissingData, what + " is not in the transcript");
  return *v;
}

}  // namespace

params::BucketParams params_from_transcript(const Transcript& transcript, BucketId bucket) {
  for (const auto& rec : transcript.legs()) {
    for (const auto& m : rec.leg.messages) {
      if (m.kind == MessageKind::kR1 && m.bucket == bucket) {
        const std::size_t ring_size = rec.leg.messages.front().payload[1].get_ui();
        return params::make_bucket_params(bucket, m.payload[0], m.payload[1], m.payload[2], ring_size);
      }
    }
  }
  throw Error(Errc::kMissingData, "bucket " + std::to_string(bucket) + " has no round-1 line");
}

AttackOutcome collusion_attack(const Transcript& transcript, const std::set<std::size_t>& colluders,
                               std::size_t target, const params::BucketParams& params,
                               std::uint64_t dl_budget,
                               const std::map<std::size_t, protocol::Secret>& colluder_secrets) {
  const ChainView chain(transcript);
  const BucketId b = params.bucket_id;
  const std::size_t position = chain.position_of(target);
  if (colluders.contains(target)) throw Error(Errc::kInvalidInput, "target cannot collude against itself");
  for (const std::size_t c : colluders) chain.position_of(c);

  AttackOutcome out;
  out.target = target;

  // Everyone else pooling their bits needs no cryptanalysis at all.
  if (colluders.size() + 1 == chain.ring_size()) {
    const bool all_known = std::all_of(colluders.begin(), colluders.end(),
                                       [&](std::size_t c) { return colluder_secrets.contains(c); });
    if (const auto count = chain.announced(b); count && all_known) {
      std::size_t theirs = 0;
      for (const std::size_t c : colluders) theirs += colluder_secrets.at(c).is_member(b) ? 1 : 0;
      out.method = "count-subtraction";
      if (*count == theirs + 1) {
        out.inferred = InferredBit::kMember;
      } else if (*count == theirs) {
        out.inferred = InferredBit::kNonmember;
      }
      return out;
    }
  }

  const auto& ring = chain.ring();
  const std::size_t before = ring[(position + ring.size() - 1) % ring.size()];
  const std::size_t after = ring[(position + 1) % ring.size()];
  if (!colluders.contains(before) || !colluders.contains(after)) {
    throw Error(Errc::kInvalidInput, "target " + std::to_string(target) + " is not surrounded by colluders");
  }

  const std::string who = "participant " + std::to_string(target);
  const Natural r1_in = need(chain.round1_in(position, b, params.x), who + " round-1 input");
  const Natural r1_out = need(chain.round1_out(position, b), who + " round-1 output");
  const Natural r2_in = need(chain.round2_in(position, b), who + " round-2 input");
  const Natural r2_out = need(chain.round2_out(position, b, params), who + " round-2 output");

  const bool two_smooth = is_power_of_two(params.p - 1) && is_power_of_two(params.q - 1);
  Natural e_mod;
  Natural d_mod;
  if (two_smooth) {
    out.method = "pohlig-hellman";
    try {
      auto e_log = pohlig_hellman_pow2(r1_in, r1_out, params.n, params.p, params.q);
      auto d_log = pohlig_hellman_pow2(r2_in, r2_out, params.n, params.p, params.q);
      out.work = e_log.work + d_log.work;
      e_mod = std::move(e_log.exponent);
      d_mod = std::move(d_log.exponent);
    } catch (const Error& e) {
      if (e.code() != Errc::kNoSolution) throw;
      return out;
    }
  } else {
    out.method = "brute-force";
    const LogResult e_log = discrete_log_bruteforce(r1_in, r1_out, params.n, dl_budget);
    out.work += e_log.work;
    if (!e_log.exponent) return out;
    const LogResult d_log = discrete_log_bruteforce(r2_in, r2_out, params.n, dl_budget);
    out.work += d_log.work;
    if (!d_log.exponent) return out;
    e_mod = *e_log.exponent;
    d_mod = *d_log.exponent;
  }

  // ord(r2_in) divides ord(r1_in), so both recovered exponents are exact
  // modulo ord(r2_in) and r2_in^(e*d) = r2_in^w decides the bit.
  const Natural probe = modpow(r2_in, e_mod * d_mod, params.n);
  out.work += 2 * bigmod::bit_length(e_mod * d_mod);
  if (probe == r2_in * r2_in % params.n) {
    out.inferred = InferredBit::kMember;
  } else if (probe == r2_in) {
    out.inferred = InferredBit::kNonmember;
  }
  return out;
}

ProbeResult jacobi_probe(const Transcript& transcript, const params::BucketParams& params) {
  ProbeResult out;
  const ChainView chain(transcript);
  const BucketId b = params.bucket_id;
  out.channel_open = bigmod::jacobi(params.x, params.n) == -1;
  for (std::size_t position = 0; position < chain.ring_size(); ++position) {
    const auto value = chain.round2_out(position, b, params);
    if (!value) break;
    const int symbol = bigmod::jacobi(*value, params.n);
    out.round2_symbols.push_back(symbol);
    if (out.channel_open && symbol == 1 && !out.first_member) out.first_member = chain.ring()[position];
  }
  return out;
}

}  // namespace ringtally::analysis
