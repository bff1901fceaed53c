#pragma once

#include <random>

#include "ringtally/message.hpp"
#include "ringtally/rng.hpp"

namespace testutil {

inline ringtally::Natural random_natural(ringtally::Rng& rng) {
  const unsigned width = static_cast<unsigned>(rng.next_u64() % 300);
  return rng.bits(width);
}

// Any message that encode accepts.
inline ringtally::transport::ProtocolMessage random_message(ringtally::Rng& rng) {
  using ringtally::transport::ProtocolMessage;
  auto bucket = [&] { return static_cast<ringtally::BucketId>(rng.next_u64()); };
  switch (rng.next_u64() % 5) {
    case 0:
      return ProtocolMessage::hello(rng.next_u64() % 100000, rng.next_u64() % 100000, rng.next_u64() % 100000);
    case 1:
      return ProtocolMessage::r1(bucket(), random_natural(rng), random_natural(rng), random_natural(rng),
                                 random_natural(rng));
    case 2:
      return ProtocolMessage::r2(bucket(), random_natural(rng));
    case 3:
      return ProtocolMessage::result(bucket(), rng.next_u64() % 1000);
    default:
      return ProtocolMessage::bye();
  }
}

}  // namespace testutil
