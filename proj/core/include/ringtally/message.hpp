#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ringtally/bigmod.hpp"
#include "ringtally/params.hpp"

namespace ringtally::transport {

enum class MessageKind { kHello, kR1, kR2, kResult, kBye };

std::string_view to_string(MessageKind kind);

/// One line of a call. Payload arity is fixed by kind:
///   HELLO  from ring_size bucket_count   (no bucket)
///   R1     p q x acc
///   R2     acc
///   RESULT count
///   BYE    (nothing, no bucket)
struct ProtocolMessage {
  MessageKind kind = MessageKind::kBye;
  std::optional<BucketId> bucket;
  std::vector<Natural> payload;

  static ProtocolMessage hello(std::size_t from, std::size_t ring_size, std::size_t bucket_count);
  static ProtocolMessage r1(BucketId bucket, Natural p, Natural q, Natural x, Natural acc);
  static ProtocolMessage r2(BucketId bucket, Natural acc);
  static ProtocolMessage result(BucketId bucket, std::size_t count);
  static ProtocolMessage bye();

  /// The accumulator carried by R1/R2 lines.
  const Natural& acc() const { return payload.back(); }

  friend bool operator==(const ProtocolMessage&, const ProtocolMessage&) = default;
};

std::size_t payload_arity(MessageKind kind);

/// Single LF-terminated ASCII line, decimal integers without leading zeros.
std::string encode(const ProtocolMessage& message);

/// Strict inverse of encode. A single trailing LF is accepted. Throws
/// MalformedLine carrying the byte offset of the offending token.
ProtocolMessage decode(std::string_view line);

/// Participant index used as the destination of a broadcast leg.
inline constexpr std::size_t kBroadcast = 0;

/// One "phone call": HELLO, bucket lines in strictly ascending bucket order, BYE.
struct CallLeg {
  std::size_t from = 0;
  std::size_t to = 0;
  std::vector<ProtocolMessage> messages;

  /// Bucket lines only (HELLO and BYE stripped).
  std::vector<ProtocolMessage> body() const;

  friend bool operator==(const CallLeg&, const CallLeg&) = default;
};

CallLeg make_leg(std::size_t from, std::size_t to, std::size_t ring_size, std::size_t bucket_count,
                 std::vector<ProtocolMessage> body);

/// Throws Errc::kInvalidInput when the HELLO/body/BYE framing is violated.
void validate_leg(const CallLeg& leg);

}  // namespace ringtally::transport
