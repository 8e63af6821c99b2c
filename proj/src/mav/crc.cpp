#include "mav/crc.hpp"

namespace webgcs::mav {

uint16_t crc_x25(std::span<const uint8_t> data, uint16_t crc) noexcept {
  for (uint8_t b : data) crc = crc_accumulate(b, crc);
  return crc;
}

uint16_t crc_x25_extra(std::span<const uint8_t> data, uint8_t crc_extra) noexcept {
  return crc_accumulate(crc_extra, crc_x25(data, kCrcSeed));
}

}  // namespace webgcs::mav
