#pragma once

#include <chrono>
#include <map>
#include <string>

#include "ringtally/protocol.hpp"
#include "ringtally/tcp.hpp"
#include "ringtally/transcript.hpp"

namespace ringtally::transport {

struct NodeOptions {
  TcpOptions tcp;
  /// How long a node waits for its next incoming call.
  std::chrono::milliseconds idle_timeout{300'000};
};

struct NodeOutcome {
  std::map<BucketId, std::size_t> counts;
  std::map<BucketId, std::string> faults;
  /// Legs this node placed, numbered by their global call order; merging
  /// every node's part yields the same transcript an in-process run records.
  Transcript sent;
};

/// Runs one participant over TCP until its part of the protocol is over.
/// `listener` must already be bound to the participant's roster address.
/// Throws Errc::kTransport / kTimeout on network faults, kProtocolOrder when
/// a peer places an unexpected call.
NodeOutcome run_node(protocol::Participant& self, const Roster& roster, Listener& listener,
                     const NodeOptions& options = {});

}  // namespace ringtally::transport
