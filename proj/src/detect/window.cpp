#include "fasa/detect/window.hpp"

#include <map>
#include <set>
#include <stdexcept>
#include <utility>

namespace fasa::detect {

WindowStats collect_window(const simnet::Trace& trace, size_t& cursor,
                           int switch_id, double t0, double t1) {
  if (t1 <= t0) throw std::invalid_argument("collect_window: t1 must exceed t0");
  WindowStats stats;
  stats.t0 = t0;
  stats.t1 = t1;

  std::map<FlowKey, FlowRow> rows;
  std::map<simnet::Mac, std::set<simnet::Ip>> ips_per_mac;

  while (cursor < trace.size() && trace[cursor].time < t1) {
    const auto& rec = trace[cursor];
    ++cursor;
    if (rec.time < t0) continue;  // before this window; already reported
    if (!simnet::seen_at_switch(rec, switch_id)) continue;

    stats.packets_seen += 1;
    const auto& pkt = rec.packet;
    FlowKey key{pkt.src_mac, pkt.src_ip, pkt.dst_ip};
    FlowRow& row = rows[key];
    if (row.packets == 0) {
      row.key = key;
      row.first_packet_id = pkt.id;
    }
    row.packets += 1;
    if (pkt.tcp_flags & simnet::tcp::kSyn) row.syn += 1;
    if (pkt.tcp_flags & simnet::tcp::kAck) row.ack += 1;
    row.bytes += pkt.size;
    ips_per_mac[pkt.src_mac].insert(pkt.src_ip);
  }

  stats.pps = stats.packets_seen / (t1 - t0);
  stats.rows.reserve(rows.size());
  for (auto& [key, row] : rows) {
    row.distinct_src_ip = ips_per_mac[key.src_mac].size();
    stats.rows.push_back(std::move(row));
  }
  return stats;
}

bool precheck_suspicious(const WindowStats& stats, double pps_threshold) {
  if (pps_threshold <= 0.0) {
    throw std::invalid_argument("precheck: threshold must be positive");
  }
  return stats.pps > pps_threshold;
}

const std::vector<std::string>& available_features() {
  static const std::vector<std::string> names = {
      "packet_count", "syn_count",       "ack_count", "byte_count",
      "distinct_src_ip", "window_pps",   "syn_ratio", "ack_ratio",
  };
  return names;
}

Eigen::VectorXd featurize(const FlowRow& row, const WindowStats& window,
                          const std::vector<std::string>& names) {
  if (names.empty()) throw std::invalid_argument("featurize: no feature names");
  Eigen::VectorXd x(static_cast<Eigen::Index>(names.size()));
  const double packets = static_cast<double>(row.packets);
  for (size_t i = 0; i < names.size(); ++i) {
    const std::string& name = names[i];
    double v = 0.0;
    if (name == "packet_count") {
      v = packets;
    } else if (name == "syn_count") {
      v = static_cast<double>(row.syn);
    } else if (name == "ack_count") {
      v = static_cast<double>(row.ack);
    } else if (name == "byte_count") {
      v = static_cast<double>(row.bytes);
    } else if (name == "distinct_src_ip") {
      v = static_cast<double>(row.distinct_src_ip);
    } else if (name == "window_pps") {
      v = window.pps;
    } else if (name == "syn_ratio") {
      v = packets > 0.0 ? static_cast<double>(row.syn) / packets : 0.0;
    } else if (name == "ack_ratio") {
      v = packets > 0.0 ? static_cast<double>(row.ack) / packets : 0.0;
    } else {
      throw std::invalid_argument("featurize: unknown feature '" + name + "'");
    }
    x[static_cast<Eigen::Index>(i)] = v;
  }
  return x;
}

}  // namespace fasa::detect
