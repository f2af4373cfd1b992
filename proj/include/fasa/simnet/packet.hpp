#pragma once

#include <cstdint>
#include <string>

namespace fasa::simnet {

using Mac = uint64_t;  // low 48 bits
using Ip = uint32_t;

namespace tcp {
constexpr uint8_t kFin = 0x01;
constexpr uint8_t kSyn = 0x02;
constexpr uint8_t kRst = 0x04;
constexpr uint8_t kPsh = 0x08;
constexpr uint8_t kAck = 0x10;
}  // namespace tcp

constexpr uint8_t kProtoTcp = 6;

struct Packet {
  double timestamp = 0.0;
  uint64_t id = 0;  // unique per generated packet; conservation is per id
  Mac src_mac = 0;
  Mac dst_mac = 0;
  Ip src_ip = 0;
  Ip dst_ip = 0;
  uint8_t ip_protocol = kProtoTcp;
  uint8_t tcp_flags = 0;
  uint16_t src_port = 0;
  uint16_t dst_port = 0;
  uint32_t size = 0;  // bytes
};

std::string mac_to_string(Mac mac);
std::string ip_to_string(Ip ip);
constexpr Ip make_ip(uint32_t a, uint32_t b, uint32_t c, uint32_t d) {
  return (a << 24) | (b << 16) | (c << 8) | d;
}

}  // namespace fasa::simnet
