#include "ringtally/message.hpp"

#include <limits>
#include <utility>

#include "ringtally/error.hpp"

namespace ringtally::transport {

std::string_view to_string(MessageKind kind) {
  switch (kind) {
    case MessageKind::kHello: return "HELLO";
    case MessageKind::kR1: return "R1";
    case MessageKind::kR2: return "R2";
    case MessageKind::kResult: return "RESULT";
    case MessageKind::kBye: return "BYE";
  }
  return "?";
}

std::size_t payload_arity(MessageKind kind) {
  switch (kind) {
    case MessageKind::kHello: return 3;
    case MessageKind::kR1: return 4;
    case MessageKind::kR2: return 1;
    case MessageKind::kResult: return 1;
    case MessageKind::kBye: return 0;
  }
  return 0;
}

namespace {

bool has_bucket(MessageKind kind) {
  return kind != MessageKind::kHello && kind != MessageKind::kBye;
}

struct Token {
  std::string_view text;
  std::size_t offset;
};

Natural parse_decimal(const Token& token) {
  if (token.text.empty()) throw MalformedLine("empty field", token.offset);
  for (std::size_t i = 0; i < token.text.size(); ++i) {
    const char c = token.text[i];
    if (c < '0' || c > '9') {
      throw MalformedLine("non-decimal character in '" + std::string(token.text) + "'",
                          token.offset + i);
    }
  }
  if (token.text.size() > 1 && token.text.front() == '0') {
    throw MalformedLine("leading zero in '" + std::string(token.text) + "'", token.offset);
  }
  return Natural(std::string(token.text), 10);
}

std::uint32_t parse_small(const Token& token) {
  const Natural value = parse_decimal(token);
  if (value > std::numeric_limits<std::uint32_t>::max()) {
    throw MalformedLine("value out of range '" + std::string(token.text) + "'", token.offset);
  }
  return static_cast<std::uint32_t>(value.get_ui());
}

}  // namespace

ProtocolMessage ProtocolMessage::hello(std::size_t from, std::size_t ring_size,
                                       std::size_t bucket_count) {
  return {MessageKind::kHello, std::nullopt,
          {Natural(static_cast<unsigned long>(from)), Natural(static_cast<unsigned long>(ring_size)),
           Natural(static_cast<unsigned long>(bucket_count))}};
}

ProtocolMessage ProtocolMessage::r1(BucketId bucket, Natural p, Natural q, Natural x, Natural acc) {
  return {MessageKind::kR1, bucket, {std::move(p), std::move(q), std::move(x), std::move(acc)}};
}

ProtocolMessage ProtocolMessage::r2(BucketId bucket, Natural acc) {
  return {MessageKind::kR2, bucket, {std::move(acc)}};
}

ProtocolMessage ProtocolMessage::result(BucketId bucket, std::size_t count) {
  return {MessageKind::kResult, bucket, {Natural(static_cast<unsigned long>(count))}};
}

ProtocolMessage ProtocolMessage::bye() { return {MessageKind::kBye, std::nullopt, {}}; }

std::string encode(const ProtocolMessage& message) {
  std::string line(to_string(message.kind));
  if (message.bucket) {
    line += ' ';
    line += std::to_string(*message.bucket);
  }
  for (const auto& value : message.payload) {
    line += ' ';
    line += value.get_str(10);
  }
  line += '\n';
  return line;
}

ProtocolMessage decode(std::string_view line) {
  if (!line.empty() && line.back() == '\n') line.remove_suffix(1);

  std::vector<Token> tokens;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= line.size(); ++i) {
    if (i == line.size() || line[i] == ' ') {
      if (i == start) throw MalformedLine("empty field", start);
      tokens.push_back({line.substr(start, i - start), start});
      start = i + 1;
    }
  }
  if (tokens.empty()) throw MalformedLine("empty line", 0);

  ProtocolMessage message;
  const std::string_view kind = tokens.front().text;
  if (kind == "HELLO") {
    message.kind = MessageKind::kHello;
  } else if (kind == "R1") {
    message.kind = MessageKind::kR1;
  } else if (kind == "R2") {
    message.kind = MessageKind::kR2;
  } else if (kind == "RESULT") {
    message.kind = MessageKind::kResult;
  } else if (kind == "BYE") {
    message.kind = MessageKind::kBye;
  } else {
    throw MalformedLine("unknown message kind '" + std::string(kind) + "'", 0);
  }

  const std::size_t expected = 1 + (has_bucket(message.kind) ? 1 : 0) + payload_arity(message.kind);
  if (tokens.size() != expected) {
    const std::size_t offset = tokens.size() > expected ? tokens[expected].offset : line.size();
    throw MalformedLine(std::string(kind) + " expects " + std::to_string(expected - 1) +
                            " fields, got " + std::to_string(tokens.size() - 1),
                        offset);
  }

  std::size_t next = 1;
  if (has_bucket(message.kind)) message.bucket = parse_small(tokens[next++]);
  for (; next < tokens.size(); ++next) {
    if (message.kind == MessageKind::kHello) {
      message.payload.emplace_back(static_cast<unsigned long>(parse_small(tokens[next])));
    } else {
      message.payload.push_back(parse_decimal(tokens[next]));
    }
  }
  return message;
}

std::vector<ProtocolMessage> CallLeg::body() const {
  if (messages.size() < 2) return {};
  return {messages.begin() + 1, messages.end() - 1};
}

CallLeg make_leg(std::size_t from, std::size_t to, std::size_t ring_size, std::size_t bucket_count,
                 std::vector<ProtocolMessage> body) {
  CallLeg leg{from, to, {}};
  leg.messages.reserve(body.size() + 2);
  leg.messages.push_back(ProtocolMessage::hello(from, ring_size, bucket_count));
  for (auto& m : body) leg.messages.push_back(std::move(m));
  leg.messages.push_back(ProtocolMessage::bye());
  return leg;
}

void validate_leg(const CallLeg& leg) {
  auto fail = [&](const std::string& why) {
    throw Error(Errc::kInvalidInput, "call leg " + std::to_string(leg.from) + "->" +
                                         std::to_string(leg.to) + ": " + why);
  };
  if (leg.messages.size() < 2) fail("needs HELLO and BYE");
  const auto& hello = leg.messages.front();
  if (hello.kind != MessageKind::kHello) fail("first line is not HELLO");
  if (leg.messages.back().kind != MessageKind::kBye) fail("last line is not BYE");
  if (hello.payload.size() != 3 || hello.payload[0] != static_cast<unsigned long>(leg.from)) {
    fail("HELLO does not name the caller");
  }
  std::optional<BucketId> previous;
  for (std::size_t i = 1; i + 1 < leg.messages.size(); ++i) {
    const auto& m = leg.messages[i];
    if (!m.bucket) fail("HELLO/BYE inside the call body");
    if (m.payload.size() != payload_arity(m.kind)) fail("wrong payload arity");
    if (previous && *m.bucket <= *previous) fail("bucket ids not strictly ascending");
    previous = m.bucket;
  }
}

}  // namespace ringtally::transport
