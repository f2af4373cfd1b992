#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "fasa/simnet/packet.hpp"
#include "fasa/simnet/trace.hpp"

namespace fasa::detect {

// Flows are aggregated per (source MAC, source IP, destination IP); a
// spoofing attacker therefore spreads over many rows that all share one MAC.
struct FlowKey {
  simnet::Mac src_mac = 0;
  simnet::Ip src_ip = 0;
  simnet::Ip dst_ip = 0;

  auto operator<=>(const FlowKey&) const = default;
};

struct FlowRow {
  FlowKey key;
  uint64_t packets = 0;
  uint64_t syn = 0;    // packets with the SYN flag set
  uint64_t ack = 0;    // packets with the ACK flag set
  uint64_t bytes = 0;
  // Distinct source IPs observed for this row's src_mac across the whole
  // window; identical for every row sharing the MAC.
  uint64_t distinct_src_ip = 0;
  // One packet id from the row, for joining against generation-time labels.
  uint64_t first_packet_id = 0;
};

struct WindowStats {
  double t0 = 0.0;
  double t1 = 0.0;
  uint64_t packets_seen = 0;
  double pps = 0.0;
  std::vector<FlowRow> rows;  // sorted by key
};

// Aggregates every packet seen at `switch_id` in [t0, t1), reading forward
// from trace[cursor] and leaving cursor on the first record at or past t1.
// Windows must be requested in increasing, contiguous order; "seen" means
// one packet-in or terminal match record per packet (seen_at_switch).
WindowStats collect_window(const simnet::Trace& trace, size_t& cursor,
                           int switch_id, double t0, double t1);

// Serving-capacity gate: true when the window's rate exceeds the threshold.
bool precheck_suspicious(const WindowStats& stats, double pps_threshold);

// Names featurize() understands, in canonical order.
const std::vector<std::string>& available_features();

// Raw (unscaled) feature vector for one row, ordered as `names`.
// Unknown names are an error.
Eigen::VectorXd featurize(const FlowRow& row, const WindowStats& window,
                          const std::vector<std::string>& names);

}  // namespace fasa::detect
