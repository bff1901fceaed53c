#include "ringtally/node.hpp"

#include "ringtally/error.hpp"

namespace ringtally::transport {

NodeOutcome run_node(protocol::Participant& self, const Roster& roster, Listener& listener,
                     const NodeOptions& options) {
  for (const std::size_t index : self.settings().ring()) {
    if (!roster.contains(index)) {
      throw Error(Errc::kInvalidInput, "roster has no address for participant " + std::to_string(index));
    }
  }

  NodeOutcome outcome;
  auto place = [&](const protocol::OutgoingCall& call) {
    if (call.leg.to == kBroadcast) {
      for (const auto& [index, at] : roster) {
        if (index != self.index()) send_leg(at, call.leg, options.tcp);
      }
    } else {
      send_leg(roster.at(call.leg.to), call.leg, options.tcp);
    }
    outcome.sent.append(call.seq, call.leg);
  };

  if (self.is_initiator()) {
    for (const auto& call : self.initiate()) place(call);
  }
  while (!self.finished()) {
    auto connection = listener.accept(options.idle_timeout);
    if (!connection) {
      throw Error(Errc::kTimeout, "participant " + std::to_string(self.index()) +
                                      " heard nothing for " + std::to_string(options.idle_timeout.count()) + " ms");
    }
    CallLeg leg = read_leg(*connection, self.index(), options.tcp.timeout);
    acknowledge(*connection);
    for (const auto& call : self.on_leg(leg)) place(call);
  }

  outcome.counts = self.state().counts;
  outcome.faults = self.state().faults;
  return outcome;
}

}  // namespace ringtally::transport
