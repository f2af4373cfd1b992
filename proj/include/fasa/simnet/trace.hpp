#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "fasa/simnet/packet.hpp"

namespace fasa::simnet {

enum class TraceKind : uint8_t {
  kGen,       // packet handed to the network by a host
  kMatch,     // switch matched an installed flow entry
  kPacketIn,  // no entry matched; packet went to the controller
  kDrop,      // packet discarded (drop rule, no route, ...)
  kDeliver,   // packet handed to the destination host
  kInstall,   // flow entry installed on a switch
  kExpire,    // flow entry removed by timeout
  kRefuse,    // host refused a connection attempt
};

const char* trace_kind_name(TraceKind kind);
std::string tcp_flags_string(uint8_t flags);

struct TraceRecord {
  TraceKind kind = TraceKind::kGen;
  double time = 0.0;
  int switch_id = -1;
  int port = -1;
  bool has_packet = false;
  Packet packet;
  // kInstall/kExpire/kDrop context: match description, reason, ...
  std::string detail;
  int priority = 0;
  uint64_t cookie = 0;
};

using Trace = std::vector<TraceRecord>;

// True when the record is the single "packet seen at this switch" event for
// its packet: a packet-in, or a match that terminally handles the packet.
// A send-to-controller match defers to the packet-in that follows it.
bool seen_at_switch(const TraceRecord& rec, int switch_id);

void write_trace(std::ostream& out, const Trace& trace);
void save_trace(const std::string& path, const Trace& trace);

}  // namespace fasa::simnet
