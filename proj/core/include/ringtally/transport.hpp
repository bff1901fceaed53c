#pragma once

#include <cstddef>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <vector>

#include "ringtally/message.hpp"
#include "ringtally/transcript.hpp"

namespace ringtally::transport {

struct Delivery {
  std::size_t recipient = 0;
  CallLeg leg;
};

/// Moves call legs between participants and keeps the public transcript.
/// Implementations deliver each leg FIFO and atomically: a leg is never
/// observed interleaved with another leg on the same link.
class Transport {
 public:
  virtual ~Transport() = default;

  /// Delivers the leg (to every other participant when `to` is kBroadcast)
  /// and appends it to the transcript. Returns the leg's seq.
  std::uint64_t send_call(const CallLeg& leg);

  /// Next delivered leg, or nullopt when nothing is pending.
  virtual std::optional<Delivery> poll() = 0;

  Transcript transcript() const;

 protected:
  virtual void deliver(const CallLeg& leg) = 0;

 private:
  mutable std::mutex transcript_mutex_;
  Transcript transcript_;
};

class InMemoryTransport final : public Transport {
 public:
  explicit InMemoryTransport(std::vector<std::size_t> participants);

  std::optional<Delivery> poll() override;

 protected:
  void deliver(const CallLeg& leg) override;

 private:
  std::vector<std::size_t> participants_;
  std::deque<Delivery> queue_;
};

}  // namespace ringtally::transport
