#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "mav/messages.hpp"

namespace webgcs::mav {

inline constexpr uint8_t kMagicV1 = 0xFE;
inline constexpr uint8_t kMagicV2 = 0xFD;
inline constexpr size_t kHeaderLenV1 = 6;
inline constexpr size_t kHeaderLenV2 = 10;
inline constexpr size_t kChecksumLen = 2;
inline constexpr size_t kSignatureLen = 13;
inline constexpr uint8_t kIncompatSigned = 0x01;

class CodecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Version { V1, V2 };

struct MessageInfo {
  uint32_t id;
  const char* name;
  uint8_t crc_extra;
  size_t base_len;  // payload length of base fields
  size_t max_len;   // including extension fields
};

// nullptr for ids outside the supported subset.
const MessageInfo* find_message_info(uint32_t msg_id) noexcept;
std::span<const MessageInfo> supported_messages() noexcept;

struct MavFrame {
  Version version = Version::V2;
  uint8_t seq = 0;
  uint8_t sys_id = 0;
  uint8_t comp_id = 0;
  uint32_t msg_id = 0;
  std::vector<uint8_t> payload;
  uint16_t checksum = 0;

  bool operator==(const MavFrame&) const = default;
};

struct FrameHeader {
  uint8_t seq = 0;
  uint8_t sys_id = 0;
  uint8_t comp_id = 0;
};

// Full-length little-endian payload of the base fields, in wire order.
std::vector<uint8_t> pack_message(const Message& msg);

// Throws CodecError for an unknown id or a payload that cannot be read.
// V2 payloads shorter than the base length are zero-extended (wire truncation);
// V1 payloads must carry every base field.
Message unpack_message(uint32_t msg_id, std::span<const uint8_t> payload, Version version = Version::V2);

// Serialized frame: magic, header, payload (V2: trailing zeros truncated), checksum.
std::vector<uint8_t> encode_frame(const Message& msg, const FrameHeader& header, Version version = Version::V2);

// Builds the frame structure that encode_frame would serialize.
MavFrame make_frame(const Message& msg, const FrameHeader& header, Version version = Version::V2);

std::vector<uint8_t> serialize_frame(const MavFrame& frame);

Message decode_message(const MavFrame& frame);

struct ParserStats {
  uint64_t frames = 0;
  uint64_t discarded_bytes = 0;
  uint64_t bad_crc = 0;
  uint64_t signed_rejected = 0;
  uint64_t unknown_msg = 0;

  ParserStats& operator+=(const ParserStats& o) {
    frames += o.frames;
    discarded_bytes += o.discarded_bytes;
    bad_crc += o.bad_crc;
    signed_rejected += o.signed_rejected;
    unknown_msg += o.unknown_msg;
    return *this;
  }
  bool operator==(const ParserStats&) const = default;
};

struct DecodeResult {
  std::vector<MavFrame> frames;
  ParserStats diagnostics;  // this call only
};

// Incremental, resynchronizing frame parser. Bytes are buffered between calls
// until a complete frame is available. Anything that is not part of a
// verified frame is discarded and counted; parsing never stops.
class FrameParser {
 public:
  DecodeResult feed(std::span<const uint8_t> chunk);

  const ParserStats& stats() const noexcept { return total_; }
  size_t buffered() const noexcept { return buf_.size() - pos_; }
  void reset() noexcept;

 private:
  enum class Step { NeedMore, Skip, Consumed };
  Step try_frame(DecodeResult& out);

  std::vector<uint8_t> buf_;
  size_t pos_ = 0;
  ParserStats total_;
};

inline DecodeResult decode_stream(std::span<const uint8_t> chunk, FrameParser& state) { return state.feed(chunk); }

}  // namespace webgcs::mav
