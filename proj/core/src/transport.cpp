#include "ringtally/transport.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "ringtally/error.hpp"

namespace ringtally::transport {

std::uint64_t Transport::send_call(const CallLeg& leg) {
  validate_leg(leg);
  deliver(leg);
  std::lock_guard lock(transcript_mutex_);
  return transcript_.append_next(leg);
}

Transcript Transport::transcript() const {
  std::lock_guard lock(transcript_mutex_);
  return transcript_;
}

InMemoryTransport::InMemoryTransport(std::vector<std::size_t> participants)
    : participants_(std::move(participants)) {}

std::optional<Delivery> InMemoryTransport::poll() {
  if (queue_.empty()) return std::nullopt;
  Delivery next = std::move(queue_.front());
  queue_.pop_front();
  return next;
}

void InMemoryTransport::deliver(const CallLeg& leg) {
  if (leg.to != kBroadcast) {
    if (std::find(participants_.begin(), participants_.end(), leg.to) == participants_.end()) {
      throw Error(Errc::kTransport, "no participant " + std::to_string(leg.to));
    }
    queue_.push_back({leg.to, leg});
    return;
  }
  for (const std::size_t p : participants_) {
    if (p != leg.from) queue_.push_back({p, leg});
  }
}

}  // namespace ringtally::transport
