#include <gtest/gtest.h>

#include "ringtally/error.hpp"
#include "ringtally/message.hpp"
#include "ringtally/protocol.hpp"
#include "ringtally/transcript.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace ringtally;
using namespace ringtally::transport;

namespace {

std::size_t malformed_offset(std::string_view line) {
  try {
    decode(line);
  } catch (const MalformedLine& e) {
    return e.offset();
  }
  ADD_FAILURE() << "accepted '" << line << "'";
  return 0;
}

std::size_t malformed_line_no(std::string_view text) {
  try {
    parse_transcript(text);
  } catch (const MalformedLine& e) {
    return e.line();
  }
  ADD_FAILURE() << "accepted transcript";
  return 0;
}

}  // namespace

TEST(Encode, Examples) {
  EXPECT_EQ(encode(ProtocolMessage::r2(17, 49)), "R2 17 49\n");
  EXPECT_EQ(encode(ProtocolMessage::bye()), "BYE\n");
  EXPECT_EQ(encode(ProtocolMessage::r1(1, 5, 17, 3, 27)), "R1 1 5 17 3 27\n");
  EXPECT_EQ(encode(ProtocolMessage::hello(2, 20, 100)), "HELLO 2 20 100\n");
  EXPECT_EQ(encode(ProtocolMessage::result(4, 0)), "RESULT 4 0\n");
}

TEST(Decode, Examples) {
  ProtocolMessage m = decode("R2 17 49");
  EXPECT_EQ(m.kind, MessageKind::kR2);
  EXPECT_EQ(m.bucket, BucketId{17});
  ASSERT_EQ(m.payload.size(), 1u);
  EXPECT_EQ(m.payload[0], 49);
  EXPECT_EQ(decode("R2 17 49\n"), m);
  EXPECT_EQ(decode("BYE"), ProtocolMessage::bye());
}

TEST(Decode, RejectsMalformedLines) {
  EXPECT_EQ(malformed_offset("R1 1 5 17 3"), 11u);
  EXPECT_EQ(malformed_offset("R2 17 049"), 6u);
  EXPECT_EQ(malformed_offset("R2 17 49 50"), 9u);
  EXPECT_EQ(malformed_offset("R2  17 49"), 3u);
  EXPECT_EQ(malformed_offset("R2 17 -4"), 6u);
  EXPECT_EQ(malformed_offset("R2 17 4x"), 7u);
  EXPECT_EQ(malformed_offset("R2 01 4"), 3u);
  EXPECT_EQ(malformed_offset("R2 4294967296 4"), 3u);
  EXPECT_EQ(malformed_offset("r2 17 4"), 0u);
  EXPECT_EQ(malformed_offset(""), 0u);
  EXPECT_EQ(malformed_offset("BYE 1"), 4u);
  malformed_offset("R2 17 49\n\n");
  malformed_offset("R2 17 49 ");
  malformed_offset("R2 17 49\r");
}

TEST(Decode, AcceptsZeroAndHugeValues) {
  EXPECT_EQ(decode("R2 0 0").payload[0], 0);
  Natural big("123456789012345678901234567890123456789012345678901234567890");
  EXPECT_EQ(decode("R2 4294967295 " + big.get_str()).payload[0], big);
}

TEST(Decode, RoundTripsRandomMessages) {
  Rng rng(2024);
  for (int i = 0; i < 10000; ++i) {
    ProtocolMessage m = testutil::random_message(rng);
    std::string line = encode(m);
    ASSERT_EQ(line.back(), '\n');
    ASSERT_EQ(line.find('\n'), line.size() - 1);
    ASSERT_EQ(decode(line), m) << line;
  }
}

TEST(Leg, FramingRules) {
  CallLeg leg = make_leg(1, 2, 3, 2, {ProtocolMessage::r2(1, 5), ProtocolMessage::r2(2, 6)});
  EXPECT_NO_THROW(validate_leg(leg));
  EXPECT_EQ(leg.messages.front(), ProtocolMessage::hello(1, 3, 2));
  EXPECT_EQ(leg.messages.back(), ProtocolMessage::bye());
  EXPECT_EQ(leg.body().size(), 2u);

  CallLeg unordered = make_leg(1, 2, 3, 2, {ProtocolMessage::r2(2, 5), ProtocolMessage::r2(1, 6)});
  EXPECT_THROW(validate_leg(unordered), Error);
  CallLeg duplicate = make_leg(1, 2, 3, 2, {ProtocolMessage::r2(1, 5), ProtocolMessage::r2(1, 6)});
  EXPECT_THROW(validate_leg(duplicate), Error);
  CallLeg wrong_hello = leg;
  wrong_hello.messages.front() = ProtocolMessage::hello(3, 3, 2);
  EXPECT_THROW(validate_leg(wrong_hello), Error);
  CallLeg no_bye = leg;
  no_bye.messages.pop_back();
  EXPECT_THROW(validate_leg(no_bye), Error);
}

TEST(Transcript, SeqMustIncrease) {
  Transcript t;
  CallLeg leg = make_leg(1, 2, 2, 1, {ProtocolMessage::r2(1, 5)});
  t.append(3, leg);
  EXPECT_THROW(t.append(3, leg), Error);
  EXPECT_THROW(t.append(2, leg), Error);
  EXPECT_EQ(t.append_next(leg), 4u);
  ASSERT_NE(t.find(3), nullptr);
  EXPECT_EQ(t.find(5), nullptr);
}

TEST(Transcript, EmptyTranscriptIsEmptyFile) {
  auto dir = testutil::scratch_dir("wire");
  persist_transcript(Transcript{}, dir / "t.txt");
  EXPECT_EQ(std::filesystem::file_size(dir / "t.txt"), 0u);
  EXPECT_TRUE(load_transcript(dir / "t.txt").empty());
  std::filesystem::remove_all(dir);
}

TEST(Transcript, FormatIsOneLinePerMessage) {
  Transcript t;
  t.append(1, make_leg(1, 2, 2, 1, {ProtocolMessage::r1(1, 5, 17, 3, 27)}));
  EXPECT_EQ(format_transcript(t),
            "1 1 2 HELLO 1 2 1\n"
            "1 1 2 R1 1 5 17 3 27\n"
            "1 1 2 BYE\n");
}

TEST(Transcript, TamperedLineReportsLineNumber) {
  auto outcome = protocol::run_tally(protocol::TallySettings{.ring_size = 3, .bucket_count = 2}, {protocol::Secret::in_bucket(1),
                                     protocol::Secret::in_bucket(2), protocol::Secret::in_bucket(1)}, 5);
  std::string text = format_transcript(outcome.transcript);
  EXPECT_EQ(parse_transcript(text), outcome.transcript);

  // Line 7 is the second leg's first bucket line.
  std::vector<std::string> lines;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  auto join = [&] {
    std::string s;
    for (auto& l : lines) s += l + "\n";
    return s;
  };
  std::string saved = lines[6];
  lines[6] += "0x";
  EXPECT_EQ(malformed_line_no(join()), 7u);
  lines[6] = saved;
  lines[6].insert(lines[6].find("R1 ") + 3, "0");
  EXPECT_EQ(malformed_line_no(join()), 7u);
  lines[6] = saved;
  lines.erase(lines.begin() + 7);  // drop the second BYE: the next HELLO interleaves
  EXPECT_EQ(malformed_line_no(join()), 8u);
}

TEST(Transcript, PersistLoadIsByteIdentical) {
  protocol::TallySettings settings;
  settings.ring_size = 6;
  settings.bucket_count = 8;
  std::vector<protocol::Secret> secrets;
  for (BucketId b : {1, 3, 3, 8, 2, 1}) secrets.push_back(protocol::Secret::in_bucket(b));
  auto outcome = protocol::run_tally(settings, secrets, 31);

  auto dir = testutil::scratch_dir("wire");
  persist_transcript(outcome.transcript, dir / "a.txt");
  Transcript loaded = load_transcript(dir / "a.txt");
  EXPECT_EQ(loaded, outcome.transcript);
  persist_transcript(loaded, dir / "b.txt");
  EXPECT_EQ(testutil::read_file(dir / "a.txt"), testutil::read_file(dir / "b.txt"));
  std::filesystem::remove_all(dir);
}

TEST(Transcript, MergeOrdersBySeq) {
  Transcript a, b;
  CallLeg leg = make_leg(1, 2, 2, 1, {ProtocolMessage::r2(1, 5)});
  a.append(1, leg);
  a.append(4, leg);
  b.append(2, leg);
  Transcript merged = Transcript::merge({a, b});
  ASSERT_EQ(merged.size(), 3u);
  EXPECT_EQ(merged.legs()[1].seq, 2u);
  EXPECT_THROW(Transcript::merge({a, a}), Error);
}
