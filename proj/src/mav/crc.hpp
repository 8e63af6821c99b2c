#pragma once

#include <cstdint>
#include <span>

namespace webgcs::mav {

inline constexpr uint16_t kCrcSeed = 0xFFFF;

// CRC-16/MCRF4XX ("X.25" in MAVLink parlance), one byte at a time.
constexpr uint16_t crc_accumulate(uint8_t byte, uint16_t crc) noexcept {
  uint8_t tmp = static_cast<uint8_t>(byte ^ static_cast<uint8_t>(crc & 0xFF));
  tmp = static_cast<uint8_t>(tmp ^ static_cast<uint8_t>(tmp << 4));
  return static_cast<uint16_t>((crc >> 8) ^ (uint16_t(tmp) << 8) ^ (uint16_t(tmp) << 3) ^ (tmp >> 4));
}

uint16_t crc_x25(std::span<const uint8_t> data, uint16_t crc = kCrcSeed) noexcept;

// Checksum as used on the wire: data followed by the message's CRC_EXTRA byte.
uint16_t crc_x25_extra(std::span<const uint8_t> data, uint8_t crc_extra) noexcept;

}  // namespace webgcs::mav
