#include "ringtally/protocol.hpp"

#include <set>

#include "ringtally/error.hpp"

namespace ringtally::protocol {

namespace {

using transport::CallLeg;
using transport::ProtocolMessage;

std::map<BucketId, ProtocolMessage> lines_by_bucket(const CallLeg& leg) {
  std::map<BucketId, ProtocolMessage> out;
  for (auto& m : leg.body()) out.emplace(*m.bucket, std::move(m));
  return out;
}

}  // namespace

ReplayReport replay_transcript(const transport::Transcript& recorded, const TallySettings& settings,
                               const std::vector<Secret>& secrets, std::uint64_t seed) {
  auto actors = make_participants(settings, secrets, seed);
  std::map<std::size_t, Participant*> by_index;
  for (auto& a : actors) by_index[a.index()] = &a;

  ReplayReport report;
  std::set<std::uint64_t> produced;
  auto flag_all = [&](const CallLeg& leg, const std::string& why) {
    for (const auto& m : leg.body()) report.mismatched.emplace(*m.bucket, why);
  };

  auto compare = [&](const OutgoingCall& call) {
    produced.insert(call.seq);
    const auto* rec = recorded.find(call.seq);
    const std::string where = "call " + std::to_string(call.seq);
    if (rec == nullptr) {
      report.notes.push_back(where + " is missing from the transcript");
      flag_all(call.leg, where + " missing");
      return;
    }
    if (rec->leg.from != call.leg.from || rec->leg.to != call.leg.to ||
        rec->leg.messages.front() != call.leg.messages.front()) {
      report.notes.push_back(where + " has the wrong caller, callee or HELLO");
      flag_all(call.leg, where + " misaddressed");
      flag_all(rec->leg, where + " misaddressed");
      return;
    }
    const auto expected = lines_by_bucket(call.leg);
    const auto actual = lines_by_bucket(rec->leg);
    for (const auto& [b, m] : expected) {
      const auto it = actual.find(b);
      if (it == actual.end()) {
        report.mismatched.emplace(b, where + ": recomputed line absent from transcript");
      } else if (it->second != m) {
        std::string line = transport::encode(it->second);
        line.pop_back();
        if (line.size() > 60) line = line.substr(0, 57) + "...";
        report.mismatched.emplace(b, where + ": recorded '" + line + "' differs from recomputation");
      }
    }
    for (const auto& [b, m] : actual) {
      if (!expected.contains(b)) report.mismatched.emplace(b, where + ": line not reproducible");
    }
  };

  for (auto& actor : actors) {
    if (!actor.is_initiator()) continue;
    for (const auto& call : actor.initiate()) compare(call);
  }

  for (const auto& rec : recorded.legs()) {
    std::vector<std::size_t> recipients;
    if (rec.leg.to == transport::kBroadcast) {
      for (const auto& [index, actor] : by_index) {
        if (index != rec.leg.from) recipients.push_back(index);
      }
    } else {
      recipients.push_back(rec.leg.to);
    }
    for (const std::size_t r : recipients) {
      const auto it = by_index.find(r);
      if (it == by_index.end()) {
        report.notes.push_back("call " + std::to_string(rec.seq) + " addressed to unknown participant");
        flag_all(rec.leg, "unknown callee");
        continue;
      }
      try {
        for (const auto& call : it->second->on_leg(rec.leg)) compare(call);
      } catch (const Error& e) {
        report.notes.push_back("call " + std::to_string(rec.seq) + " rejected: " + e.what());
        flag_all(rec.leg, "rejected by callee");
      }
    }
  }

  for (const auto& rec : recorded.legs()) {
    if (!produced.contains(rec.seq)) {
      report.notes.push_back("call " + std::to_string(rec.seq) + " was never placed by any participant");
      flag_all(rec.leg, "surplus call");
    }
  }
  return report;
}

}  // namespace ringtally::protocol
