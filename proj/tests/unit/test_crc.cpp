#include <doctest.h>

#include <random>

#include "../support/oracles.hpp"
#include "mav/codec.hpp"
#include "mav/crc.hpp"

using namespace webgcs::mav;

TEST_CASE("x25 matches the catalogue check value") {
  const std::string_view check = "123456789";
  const auto bytes = std::span(reinterpret_cast<const uint8_t*>(check.data()), check.size());
  CHECK(oracle::crc16(bytes) == 0x6F91);
  CHECK(crc_x25(bytes) == 0x6F91);
}

TEST_CASE("x25 of empty input is the seed") {
  CHECK(crc_x25(std::span<const uint8_t>{}) == kCrcSeed);
}

TEST_CASE("x25 agrees with the table-driven oracle on random buffers") {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<int> byte(0, 255);
  std::uniform_int_distribution<size_t> len(0, 300);
  for (int i = 0; i < 2000; ++i) {
    std::vector<uint8_t> buf(len(rng));
    for (auto& b : buf) b = static_cast<uint8_t>(byte(rng));
    REQUIRE(crc_x25(buf) == oracle::crc16(buf));
    const auto extra = static_cast<uint8_t>(byte(rng));
    const uint8_t e[1] = {extra};
    REQUIRE(crc_x25_extra(buf, extra) == oracle::crc16(std::span<const uint8_t>(e, 1), oracle::crc16(buf)));
  }
}

TEST_CASE("x25 is incremental over any split point") {
  std::mt19937_64 rng(11);
  std::vector<uint8_t> buf(128);
  for (auto& b : buf) b = static_cast<uint8_t>(rng());
  const uint16_t whole = crc_x25(buf);
  for (size_t cut = 0; cut <= buf.size(); ++cut) {
    const auto head = std::span(buf).first(cut);
    const auto tail = std::span(buf).subspan(cut);
    REQUIRE(crc_x25(tail, crc_x25(head)) == whole);
  }
}

TEST_CASE("CRC_EXTRA table re-derives from the field layouts") {
  const auto& specs = oracle::message_specs();
  REQUIRE(specs.size() == supported_messages().size());
  for (const auto& layout : specs) {
    CAPTURE(layout.name);
    const MessageInfo* info = find_message_info(layout.id);
    REQUIRE(info != nullptr);
    CHECK(std::string_view(info->name) == layout.name);
    CHECK(info->crc_extra == oracle::crc_extra(layout));
    CHECK(info->base_len == static_cast<size_t>(oracle::payload_len(layout)));
  }
}

TEST_CASE("CRC_EXTRA spot values") {
  CHECK(Heartbeat::kCrcExtra == 50);
  CHECK(CommandLong::kCrcExtra == 152);
  CHECK(CommandAck::kCrcExtra == 143);
  CHECK(GlobalPositionInt::kCrcExtra == 104);
}
