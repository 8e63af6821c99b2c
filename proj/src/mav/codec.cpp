#include "mav/codec.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <type_traits>

#include "mav/crc.hpp"

namespace webgcs::mav {
namespace {

template <class T>
struct is_char_array : std::false_type {};
template <size_t N>
struct is_char_array<std::array<char, N>> : std::true_type {};

template <class T>
constexpr size_t wire_size() {
  if constexpr (is_char_array<T>::value) {
    return std::tuple_size_v<T>;
  } else {
    return sizeof(T);
  }
}

template <class Msg>
constexpr size_t base_length() {
  return std::apply([](auto... f) { return (size_t{0} + ... + wire_size<std::remove_cvref_t<decltype(std::declval<Msg>().*(f.member))>>()); },
                    Msg::fields());
}

template <class T>
void put(std::vector<uint8_t>& out, const T& value) {
  if constexpr (is_char_array<T>::value) {
    out.insert(out.end(), value.begin(), value.end());
  } else {
    using U = std::conditional_t<sizeof(T) == 1, uint8_t,
              std::conditional_t<sizeof(T) == 2, uint16_t, std::conditional_t<sizeof(T) == 4, uint32_t, uint64_t>>>;
    U bits = std::bit_cast<U>(value);
    for (size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<uint8_t>(bits >> (8 * i)));
  }
}

template <class T>
void get(const uint8_t* in, T& value) {
  if constexpr (is_char_array<T>::value) {
    std::memcpy(value.data(), in, value.size());
  } else {
    using U = std::conditional_t<sizeof(T) == 1, uint8_t,
              std::conditional_t<sizeof(T) == 2, uint16_t, std::conditional_t<sizeof(T) == 4, uint32_t, uint64_t>>>;
    U bits = 0;
    for (size_t i = 0; i < sizeof(T); ++i) bits |= static_cast<U>(U(in[i]) << (8 * i));
    value = std::bit_cast<T>(bits);
  }
}

template <class Msg>
std::vector<uint8_t> pack_typed(const Msg& msg) {
  std::vector<uint8_t> out;
  out.reserve(base_length<Msg>());
  std::apply([&](auto... f) { (put(out, msg.*(f.member)), ...); }, Msg::fields());
  return out;
}

template <class Msg>
Msg unpack_typed(std::span<const uint8_t> payload) {
  constexpr size_t len = base_length<Msg>();
  std::array<uint8_t, len> padded{};
  std::copy_n(payload.begin(), std::min(payload.size(), len), padded.begin());
  Msg msg{};
  size_t offset = 0;
  std::apply(
      [&](auto... f) {
        ((get(padded.data() + offset, msg.*(f.member)),
          offset += wire_size<std::remove_cvref_t<decltype(msg.*(f.member))>>()),
         ...);
      },
      Msg::fields());
  return msg;
}

template <class Msg>
constexpr MessageInfo info_of() {
  return MessageInfo{Msg::kId, Msg::kName, Msg::kCrcExtra, base_length<Msg>(), Msg::kMaxLen};
}

template <class... Ms>
constexpr auto build_table(std::variant<Ms...>*) {
  return std::array<MessageInfo, sizeof...(Ms)>{info_of<Ms>()...};
}

constexpr auto kTable = build_table(static_cast<Message*>(nullptr));

static_assert(info_of<Heartbeat>().base_len == 9);
static_assert(info_of<SysStatus>().base_len == 31);
static_assert(info_of<GpsRawInt>().base_len == 30);
static_assert(info_of<Attitude>().base_len == 28);
static_assert(info_of<GlobalPositionInt>().base_len == 28);
static_assert(info_of<VfrHud>().base_len == 20);
static_assert(info_of<CommandLong>().base_len == 33);
static_assert(info_of<CommandAck>().base_len == 3);
static_assert(info_of<SetPositionTargetGlobalInt>().base_len == 53);
static_assert(info_of<StatusText>().base_len == 51);

template <class... Ms>
Message unpack_by_id(uint32_t id, std::span<const uint8_t> payload, std::variant<Ms...>*) {
  Message out;
  bool found = ((id == Ms::kId ? (out = unpack_typed<Ms>(payload), true) : false) || ...);
  if (!found) throw CodecError("unsupported msg_id " + std::to_string(id));
  return out;
}

}  // namespace

const MessageInfo* find_message_info(uint32_t msg_id) noexcept {
  for (const auto& info : kTable) {
    if (info.id == msg_id) return &info;
  }
  return nullptr;
}

std::span<const MessageInfo> supported_messages() noexcept { return kTable; }

std::vector<uint8_t> pack_message(const Message& msg) {
  return std::visit([](const auto& m) { return pack_typed(m); }, msg);
}

Message unpack_message(uint32_t msg_id, std::span<const uint8_t> payload, Version version) {
  const MessageInfo* info = find_message_info(msg_id);
  if (info == nullptr) throw CodecError("unsupported msg_id " + std::to_string(msg_id));
  if (payload.empty()) throw CodecError(std::string(info->name) + ": empty payload");
  if (version == Version::V1 && payload.size() < info->base_len) {
    throw CodecError(std::string(info->name) + ": V1 payload too short (" + std::to_string(payload.size()) +
                     " < " + std::to_string(info->base_len) + ")");
  }
  return unpack_by_id(msg_id, payload, static_cast<Message*>(nullptr));
}

MavFrame make_frame(const Message& msg, const FrameHeader& header, Version version) {
  const uint32_t id = message_id(msg);
  if (version == Version::V1 && id > 0xFF) throw CodecError("msg_id " + std::to_string(id) + " does not fit V1");
  const MessageInfo* info = find_message_info(id);

  MavFrame frame;
  frame.version = version;
  frame.seq = header.seq;
  frame.sys_id = header.sys_id;
  frame.comp_id = header.comp_id;
  frame.msg_id = id;
  frame.payload = pack_message(msg);
  if (version == Version::V2) {
    while (frame.payload.size() > 1 && frame.payload.back() == 0) frame.payload.pop_back();
  }
  // Serialize once to compute the checksum over the exact wire bytes.
  auto bytes = serialize_frame(frame);
  const size_t body_end = bytes.size() - kChecksumLen;
  frame.checksum = crc_x25_extra(std::span(bytes).subspan(1, body_end - 1), info->crc_extra);
  return frame;
}

std::vector<uint8_t> serialize_frame(const MavFrame& frame) {
  if (frame.payload.size() > 255) throw CodecError("payload longer than 255 bytes");
  std::vector<uint8_t> out;
  const auto len = static_cast<uint8_t>(frame.payload.size());
  if (frame.version == Version::V1) {
    if (frame.msg_id > 0xFF) throw CodecError("msg_id does not fit V1");
    out = {kMagicV1, len, frame.seq, frame.sys_id, frame.comp_id, static_cast<uint8_t>(frame.msg_id)};
  } else {
    out = {kMagicV2,
           len,
           0,
           0,
           frame.seq,
           frame.sys_id,
           frame.comp_id,
           static_cast<uint8_t>(frame.msg_id),
           static_cast<uint8_t>(frame.msg_id >> 8),
           static_cast<uint8_t>(frame.msg_id >> 16)};
  }
  out.insert(out.end(), frame.payload.begin(), frame.payload.end());
  out.push_back(static_cast<uint8_t>(frame.checksum & 0xFF));
  out.push_back(static_cast<uint8_t>(frame.checksum >> 8));
  return out;
}

std::vector<uint8_t> encode_frame(const Message& msg, const FrameHeader& header, Version version) {
  return serialize_frame(make_frame(msg, header, version));
}

Message decode_message(const MavFrame& frame) { return unpack_message(frame.msg_id, frame.payload, frame.version); }

void FrameParser::reset() noexcept {
  buf_.clear();
  pos_ = 0;
  total_ = {};
}

FrameParser::Step FrameParser::try_frame(DecodeResult& out) {
  const size_t avail = buf_.size() - pos_;
  const uint8_t* p = buf_.data() + pos_;
  const uint8_t magic = p[0];
  if (magic != kMagicV1 && magic != kMagicV2) return Step::Skip;

  const bool v2 = magic == kMagicV2;
  const size_t header_len = v2 ? kHeaderLenV2 : kHeaderLenV1;
  if (avail < header_len) return Step::NeedMore;

  const size_t len = p[1];
  uint8_t incompat = 0;
  uint32_t msg_id = 0;
  if (v2) {
    incompat = p[2];
    if ((incompat & ~kIncompatSigned) != 0) return Step::Skip;
    msg_id = uint32_t(p[7]) | (uint32_t(p[8]) << 8) | (uint32_t(p[9]) << 16);
  } else {
    msg_id = p[5];
  }

  const MessageInfo* info = find_message_info(msg_id);
  if (info == nullptr) {
    ++out.diagnostics.unknown_msg;
    return Step::Skip;
  }
  if (v2 ? (len == 0 || len > info->max_len) : len != info->base_len) return Step::Skip;

  const bool is_signed = v2 && (incompat & kIncompatSigned) != 0;
  const size_t total = header_len + len + kChecksumLen + (is_signed ? kSignatureLen : 0);
  if (avail < total) return Step::NeedMore;

  const uint16_t wire_crc = uint16_t(p[header_len + len]) | (uint16_t(p[header_len + len + 1]) << 8);
  const uint16_t crc = crc_x25_extra(std::span(p + 1, header_len + len - 1), info->crc_extra);
  if (crc != wire_crc) {
    ++out.diagnostics.bad_crc;
    return Step::Skip;
  }
  if (is_signed) {
    ++out.diagnostics.signed_rejected;
    pos_ += total;
    return Step::Consumed;
  }

  MavFrame frame;
  frame.version = v2 ? Version::V2 : Version::V1;
  if (v2) {
    frame.seq = p[4];
    frame.sys_id = p[5];
    frame.comp_id = p[6];
  } else {
    frame.seq = p[2];
    frame.sys_id = p[3];
    frame.comp_id = p[4];
  }
  frame.msg_id = msg_id;
  frame.payload.assign(p + header_len, p + header_len + len);
  frame.checksum = wire_crc;
  out.frames.push_back(std::move(frame));
  ++out.diagnostics.frames;
  pos_ += total;
  return Step::Consumed;
}

DecodeResult FrameParser::feed(std::span<const uint8_t> chunk) {
  DecodeResult out;
  buf_.insert(buf_.end(), chunk.begin(), chunk.end());
  while (pos_ < buf_.size()) {
    Step step = try_frame(out);
    if (step == Step::NeedMore) break;
    if (step == Step::Skip) {
      ++pos_;
      ++out.diagnostics.discarded_bytes;
    }
  }
  buf_.erase(buf_.begin(), buf_.begin() + static_cast<std::ptrdiff_t>(pos_));
  pos_ = 0;
  total_ += out.diagnostics;
  return out;
}

}  // namespace webgcs::mav
