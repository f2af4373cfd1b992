#include "fasa/simnet/packet.hpp"

#include <cstdio>

namespace fasa::simnet {

std::string mac_to_string(Mac mac) {
  char buf[18];
  std::snprintf(buf, sizeof(buf), "%02x:%02x:%02x:%02x:%02x:%02x",
                unsigned((mac >> 40) & 0xff), unsigned((mac >> 32) & 0xff),
                unsigned((mac >> 24) & 0xff), unsigned((mac >> 16) & 0xff),
                unsigned((mac >> 8) & 0xff), unsigned(mac & 0xff));
  return buf;
}

std::string ip_to_string(Ip ip) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u", (ip >> 24) & 0xff,
                (ip >> 16) & 0xff, (ip >> 8) & 0xff, ip & 0xff);
  return buf;
}

}  // namespace fasa::simnet
