#include <doctest.h>

#include <cstring>
#include <random>

#include "../support/oracles.hpp"
#include "../support/random_messages.hpp"
#include "mav/codec.hpp"

using namespace webgcs::mav;

namespace {

std::vector<uint8_t> concat(const std::vector<std::vector<uint8_t>>& parts) {
  std::vector<uint8_t> out;
  for (const auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

size_t header_len(const std::vector<uint8_t>& frame) { return frame[0] == kMagicV1 ? kHeaderLenV1 : kHeaderLenV2; }

}  // namespace

TEST_CASE("randomized round trip in both versions") {
  std::mt19937_64 rng(2024);
  FrameParser parser;
  for (int i = 0; i < 1000; ++i) {
    const Message msg = testsupport::random_message(rng);
    const Version v = (i % 2) ? Version::V1 : Version::V2;
    const FrameHeader h{static_cast<uint8_t>(i), static_cast<uint8_t>(rng()), static_cast<uint8_t>(rng())};
    const auto bytes = encode_frame(msg, h, v);
    auto result = decode_stream(bytes, parser);
    REQUIRE(result.frames.size() == 1);
    const MavFrame& f = result.frames[0];
    CHECK(f.version == v);
    CHECK(f.seq == h.seq);
    CHECK(f.sys_id == h.sys_id);
    CHECK(f.comp_id == h.comp_id);
    CHECK(f.msg_id == message_id(msg));
    REQUIRE(decode_message(f) == msg);
    CHECK(parser.buffered() == 0);

    const MessageInfo* info = find_message_info(f.msg_id);
    const uint16_t expect = oracle::frame_checksum(bytes, header_len(bytes), bytes[1], info->crc_extra);
    CHECK(f.checksum == expect);
    CHECK((bytes[bytes.size() - 2] | (bytes[bytes.size() - 1] << 8)) == expect);
  }
  CHECK(parser.stats().discarded_bytes == 0);
  CHECK(parser.stats().bad_crc == 0);
}

TEST_CASE("V2 truncation drops trailing zeros and unpacks to the same message") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 500; ++i) {
    const Message msg = testsupport::random_message(rng);
    const auto full = pack_message(msg);
    const MavFrame f = make_frame(msg, {}, Version::V2);
    size_t expect_len = full.size();
    while (expect_len > 1 && full[expect_len - 1] == 0) --expect_len;
    REQUIRE(f.payload.size() == expect_len);
    CHECK(std::equal(f.payload.begin(), f.payload.end(), full.begin()));
    CHECK(unpack_message(f.msg_id, f.payload) == msg);
    // V1 never truncates.
    CHECK(make_frame(msg, {}, Version::V1).payload.size() == full.size());
  }
}

TEST_CASE("all-zero ATTITUDE truncates to one byte") {
  Attitude a{};
  const auto full = pack_message(a);
  CHECK(full.size() == 28);
  CHECK(std::all_of(full.begin(), full.end(), [](uint8_t b) { return b == 0; }));
  const MavFrame f = make_frame(a, {}, Version::V2);
  CHECK(f.payload.size() == 1);
  CHECK(std::get<Attitude>(decode_message(f)) == a);
}

TEST_CASE("takeoff COMMAND_LONG keeps its float altitude bit-exact") {
  CommandLong c{};
  c.command = 22;
  c.param7 = 15.24f;
  c.target_system = 1;
  c.target_component = 1;
  FrameParser parser;
  auto result = decode_stream(encode_frame(c, {3, 255, 190}), parser);
  REQUIRE(result.frames.size() == 1);
  const auto back = std::get<CommandLong>(decode_message(result.frames[0]));
  CHECK(back.command == 22);
  CHECK(std::memcmp(&back.param7, &c.param7, sizeof(float)) == 0);
  CHECK(back == c);
}

TEST_CASE("payload bytes are little-endian in wire order") {
  Heartbeat hb{};
  hb.custom_mode = 0x04030201;
  hb.type = 2;
  hb.autopilot = 3;
  hb.base_mode = 0x81;
  hb.system_status = 4;
  hb.mavlink_version = 3;
  CHECK(pack_message(hb) == std::vector<uint8_t>{0x01, 0x02, 0x03, 0x04, 2, 3, 0x81, 4, 3});

  CommandAck ack{};
  ack.command = 400;
  ack.result = 4;
  CHECK(pack_message(ack) == std::vector<uint8_t>{0x90, 0x01, 4});
}

TEST_CASE("frame header layout") {
  CommandAck ack{};
  ack.command = 0x0190;
  ack.result = 0;
  const auto v2 = encode_frame(ack, {9, 1, 2}, Version::V2);
  // FD len incompat compat seq sys comp id0 id1 id2
  CHECK(v2[0] == kMagicV2);
  CHECK(v2[1] == 2);  // trailing zero result byte truncated
  CHECK(v2[2] == 0);
  CHECK(v2[3] == 0);
  CHECK(v2[4] == 9);
  CHECK(v2[5] == 1);
  CHECK(v2[6] == 2);
  CHECK(v2[7] == 77);
  CHECK(v2[8] == 0);
  CHECK(v2[9] == 0);
  CHECK(v2.size() == kHeaderLenV2 + 2 + kChecksumLen);

  const auto v1 = encode_frame(ack, {9, 1, 2}, Version::V1);
  CHECK(v1[0] == kMagicV1);
  CHECK(v1[1] == 3);
  CHECK(v1[2] == 9);
  CHECK(v1[5] == 77);
  CHECK(v1.size() == kHeaderLenV1 + 3 + kChecksumLen);
}

TEST_CASE("unpack errors") {
  const std::vector<uint8_t> some(10, 1);
  CHECK_THROWS_AS(unpack_message(42, some), CodecError);
  CHECK_THROWS_AS(unpack_message(0, std::span<const uint8_t>{}), CodecError);
  CHECK_THROWS_AS(unpack_message(0, std::span(some).first(5), Version::V1), CodecError);
  CHECK_NOTHROW(unpack_message(0, std::span(some).first(5), Version::V2));
  // Extension bytes beyond the base fields are tolerated.
  CHECK_NOTHROW(unpack_message(77, std::vector<uint8_t>(10, 0), Version::V2));
}

TEST_CASE("any chunking yields the one-shot frame sequence") {
  std::mt19937_64 rng(99);
  std::vector<std::vector<uint8_t>> frames;
  for (int i = 0; i < 200; ++i) {
    frames.push_back(encode_frame(testsupport::random_message(rng), {static_cast<uint8_t>(i), 1, 1},
                                  (rng() & 1) ? Version::V1 : Version::V2));
  }
  const auto stream = concat(frames);
  FrameParser one;
  const auto whole = decode_stream(stream, one).frames;
  REQUIRE(whole.size() == frames.size());

  for (int trial = 0; trial < 50; ++trial) {
    FrameParser p;
    std::vector<MavFrame> got;
    size_t pos = 0;
    std::uniform_int_distribution<size_t> step(1, 97);
    while (pos < stream.size()) {
      const size_t n = std::min(step(rng), stream.size() - pos);
      auto r = decode_stream(std::span(stream).subspan(pos, n), p);
      got.insert(got.end(), r.frames.begin(), r.frames.end());
      pos += n;
    }
    REQUIRE(got == whole);
  }

  FrameParser bytewise;
  std::vector<MavFrame> got;
  for (uint8_t b : stream) {
    auto r = bytewise.feed(std::span(&b, 1));
    got.insert(got.end(), r.frames.begin(), r.frames.end());
  }
  CHECK(got == whole);
}

TEST_CASE("garbage between frames costs no valid frame") {
  std::mt19937_64 rng(1234);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<uint8_t> stream;
    std::vector<Message> sent;
    size_t garbage_total = 0;
    for (int i = 0; i < 100; ++i) {
      std::vector<uint8_t> garbage(rng() % 40);
      for (auto& b : garbage) {
        // Plenty of fake magic bytes to tempt the parser.
        const auto r = rng() % 8;
        b = r == 0 ? kMagicV2 : r == 1 ? kMagicV1 : static_cast<uint8_t>(rng());
      }
      garbage_total += garbage.size();
      stream.insert(stream.end(), garbage.begin(), garbage.end());
      const Message m = testsupport::random_message(rng);
      sent.push_back(m);
      const auto f = encode_frame(m, {static_cast<uint8_t>(i), 1, 1}, (rng() & 1) ? Version::V1 : Version::V2);
      stream.insert(stream.end(), f.begin(), f.end());
    }
    FrameParser p;
    auto r = decode_stream(stream, p);
    std::vector<Message> got;
    for (const auto& f : r.frames) got.push_back(decode_message(f));
    REQUIRE(got == sent);
    CHECK(r.diagnostics.discarded_bytes == garbage_total);
  }
}

TEST_CASE("corrupted frame is dropped and its neighbours survive") {
  Heartbeat hb{};
  hb.type = 2;
  GlobalPositionInt pos{};
  pos.lat = 337000000;
  VfrHud hud{};
  hud.groundspeed = 5.0f;
  auto a = encode_frame(hb, {0, 1, 1});
  auto b = encode_frame(pos, {1, 1, 1});
  auto c = encode_frame(hud, {2, 1, 1});
  b[kHeaderLenV2 + 2] ^= 0xFF;  // flip a payload byte
  const auto stream = concat({a, b, c});
  FrameParser p;
  auto r = decode_stream(stream, p);
  REQUIRE(r.frames.size() == 2);
  CHECK(std::get<Heartbeat>(decode_message(r.frames[0])) == hb);
  CHECK(std::get<VfrHud>(decode_message(r.frames[1])) == hud);
  CHECK(r.diagnostics.bad_crc == 1);
  CHECK(r.diagnostics.discarded_bytes == b.size());
}

TEST_CASE("signed frames are rejected with a diagnostic") {
  CommandAck ack{};
  ack.command = 400;
  ack.result = 0;
  MavFrame f = make_frame(ack, {0, 1, 1});
  auto bytes = serialize_frame(f);
  // Re-flag as signed, fix the checksum, append a signature block.
  bytes[2] = kIncompatSigned;
  const size_t len = bytes[1];
  const uint16_t crc =
      oracle::frame_checksum(bytes, kHeaderLenV2, len, find_message_info(77)->crc_extra);
  bytes[kHeaderLenV2 + len] = static_cast<uint8_t>(crc & 0xFF);
  bytes[kHeaderLenV2 + len + 1] = static_cast<uint8_t>(crc >> 8);
  bytes.insert(bytes.end(), kSignatureLen, 0xAB);

  const auto next = encode_frame(Heartbeat{}, {1, 1, 1});
  bytes.insert(bytes.end(), next.begin(), next.end());
  FrameParser p;
  auto r = decode_stream(bytes, p);
  REQUIRE(r.frames.size() == 1);
  CHECK(r.frames[0].msg_id == 0);
  CHECK(r.diagnostics.signed_rejected == 1);
  CHECK(p.buffered() == 0);
}

TEST_CASE("frames for unknown message ids are skipped") {
  // A syntactically valid V2 frame for msg id 42 (not in the subset).
  std::vector<uint8_t> unknown = {kMagicV2, 2, 0, 0, 0, 1, 1, 42, 0, 0, 7, 7, 0, 0};
  const auto hb = encode_frame(Heartbeat{}, {1, 1, 1});
  unknown.insert(unknown.end(), hb.begin(), hb.end());
  FrameParser p;
  auto r = decode_stream(unknown, p);
  REQUIRE(r.frames.size() == 1);
  CHECK(r.frames[0].msg_id == 0);
  CHECK(r.diagnostics.unknown_msg >= 1);
}

TEST_CASE("partial frame waits for the rest") {
  const auto bytes = encode_frame(GlobalPositionInt{}, {0, 1, 1});
  FrameParser p;
  auto r = decode_stream(std::span(bytes).first(bytes.size() - 1), p);
  CHECK(r.frames.empty());
  CHECK(p.buffered() == bytes.size() - 1);
  r = decode_stream(std::span(bytes).last(1), p);
  CHECK(r.frames.size() == 1);
  CHECK(p.buffered() == 0);
}
