#include "fasa/detect/detector.hpp"

#include <algorithm>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fasa/common/text.hpp"

namespace fasa::detect {

using simnet::FlowEntry;
using simnet::Simulator;

void DetectorConfig::validate() const {
  if (monitored_switch < 0) {
    throw std::invalid_argument("detector: monitored switch must be >= 0");
  }
  if (collection_interval <= 0.0) {
    throw std::invalid_argument("detector: collection interval must be positive");
  }
  if (pps_threshold <= 0.0) {
    throw std::invalid_argument("detector: pps threshold must be positive");
  }
  if (block_priority == allow_priority) {
    throw std::invalid_argument("detector: block and allow priorities must differ");
  }
  if (block_idle < 0.0 || block_hard < 0.0 || allow_idle < 0.0 || allow_hard < 0.0) {
    throw std::invalid_argument("detector: timeouts must be >= 0");
  }
}

simnet::Mac identify_attacker(const std::vector<FlowRow>& malicious_rows) {
  if (malicious_rows.empty()) {
    throw std::runtime_error("identify_attacker: nothing to mitigate");
  }
  struct PerMac {
    uint64_t distinct = 0;
    uint64_t packets = 0;
  };
  std::map<simnet::Mac, PerMac> per_mac;
  for (const auto& row : malicious_rows) {
    PerMac& agg = per_mac[row.key.src_mac];
    agg.distinct = std::max(agg.distinct, row.distinct_src_ip);
    agg.packets += row.packets;
  }
  auto best = per_mac.begin();
  for (auto it = std::next(per_mac.begin()); it != per_mac.end(); ++it) {
    const bool wins =
        it->second.distinct != best->second.distinct
            ? it->second.distinct > best->second.distinct
            : (it->second.packets != best->second.packets
                   ? it->second.packets > best->second.packets
                   : it->first < best->first);
    if (wins) best = it;
  }
  return best->first;
}

std::vector<MitigationAction> mitigate(simnet::Mac mac, Simulator& sim,
                                       const DetectorConfig& config) {
  const simnet::HostInfo* host = sim.topology().host_by_mac(mac);
  if (!host) {
    throw std::runtime_error("mitigate: mac " + simnet::mac_to_string(mac) +
                             " has no known host location");
  }

  FlowEntry mac_drop;
  mac_drop.match.src_mac = mac;
  mac_drop.action = simnet::Action::kDrop;
  mac_drop.priority = config.block_priority;
  mac_drop.idle_timeout = config.block_idle;
  mac_drop.hard_timeout = config.block_hard;
  mac_drop.cookie = mac;

  FlowEntry port_drop = mac_drop;
  port_drop.match = {};
  port_drop.match.in_port = host->port;

  sim.install_rule(host->switch_id, mac_drop);
  sim.install_rule(host->switch_id, port_drop);

  std::vector<MitigationAction> actions;
  actions.push_back({MitigationAction::Kind::kDropFromMac, host->switch_id,
                     host->port, mac, mac_drop});
  actions.push_back({MitigationAction::Kind::kBlockPort, host->switch_id,
                     host->port, mac, port_drop});
  return actions;
}

std::vector<MitigationAction> allow_flow(const FlowKey& key, Simulator& sim,
                                         const DetectorConfig& config) {
  const auto& topo = sim.topology();
  const simnet::HostInfo* src = topo.host_by_ip(key.src_ip);
  const simnet::HostInfo* dst = topo.host_by_ip(key.dst_ip);
  if (!src || !dst) {
    throw std::runtime_error("allow_flow: unroutable endpoint for " +
                             simnet::ip_to_string(key.src_ip) + " -> " +
                             simnet::ip_to_string(key.dst_ip));
  }

  std::vector<MitigationAction> actions;
  const int step = dst->switch_id >= src->switch_id ? 1 : -1;
  for (int sw = src->switch_id;; sw += step) {
    FlowEntry entry;
    entry.match.src_ip = key.src_ip;
    entry.match.dst_ip = key.dst_ip;
    entry.action = simnet::Action::kForward;
    entry.out_port = sw == dst->switch_id ? dst->port
                                          : topo.forward_port(sw, dst->switch_id);
    entry.priority = config.allow_priority;
    entry.idle_timeout = config.allow_idle;
    entry.hard_timeout = config.allow_hard;
    entry.cookie = (static_cast<uint64_t>(key.src_ip) << 32) | key.dst_ip;
    sim.install_rule(sw, entry);
    actions.push_back({MitigationAction::Kind::kAllowFlow, sw, entry.out_port,
                       key.src_mac, entry});
    if (sw == dst->switch_id) break;
  }
  return actions;
}

Detector::Detector(const anfis::AnfisModel* model, DetectorConfig config)
    : model_(model), config_(config) {
  config_.validate();
  if (!model_) throw std::invalid_argument("detector: model required");
  model_->validate();
  if (model_->feature_names.empty()) {
    throw std::invalid_argument("detector: model must name its features");
  }
  if (static_cast<int>(model_->feature_names.size()) != model_->n_inputs()) {
    throw std::invalid_argument("detector: feature names do not match model inputs");
  }
  featurize(FlowRow{}, WindowStats{}, model_->feature_names);  // names known?
}

void Detector::on_tick(Simulator& sim, double now) {
  const double t0 = std::max(0.0, now - config_.collection_interval);
  process_window(sim, collect_window(sim.trace(), cursor_,
                                     config_.monitored_switch, t0, now));
}

void Detector::process_window(Simulator& sim, WindowStats window) {
  WindowDecision d;
  d.window = next_window_++;
  d.t0 = window.t0;
  d.t1 = window.t1;
  d.pps = window.pps;
  d.rows_total = window.rows.size();
  d.suspicious = precheck_suspicious(window, config_.pps_threshold);

  if (!d.suspicious) {
    decisions_.push_back(std::move(d));
    return;
  }

  std::vector<FlowRow> malicious;
  d.scored.reserve(window.rows.size());
  for (const auto& row : window.rows) {
    Eigen::VectorXd raw = featurize(row, window, model_->feature_names);
    auto cls = anfis::classify(*model_, anfis::apply_scaler(*model_, raw));
    d.scored.push_back({row.key, row.first_packet_id, cls.probability, cls.label});
    if (cls.label == 1) malicious.push_back(row);
  }
  d.rows_malicious = malicious.size();

  if (config_.mitigation && !malicious.empty()) {
    const simnet::Mac mac = identify_attacker(malicious);
    auto it = blocked_until_.find(mac);
    const bool already_blocked = it != blocked_until_.end() && sim.now() < it->second;
    if (!already_blocked) {
      auto actions = mitigate(mac, sim, config_);
      d.actions.insert(d.actions.end(), actions.begin(), actions.end());
      blocked_until_[mac] = config_.block_hard > 0.0
                                ? sim.now() + config_.block_hard
                                : std::numeric_limits<double>::infinity();
    }
    for (const auto& row : d.scored) {
      if (row.label != 0) continue;
      auto blocked_it = blocked_until_.find(row.key.src_mac);
      if (blocked_it != blocked_until_.end() && sim.now() < blocked_it->second) continue;
      const auto flow_pair = std::make_pair(row.key.src_ip, row.key.dst_ip);
      if (allowed_.count(flow_pair)) continue;
      const auto& topo = sim.topology();
      // Replies to spoofed addresses produce benign rows with no route back;
      // they get no allow entry.
      if (!topo.host_by_ip(row.key.src_ip) || !topo.host_by_ip(row.key.dst_ip)) continue;
      auto actions = allow_flow(row.key, sim, config_);
      d.actions.insert(d.actions.end(), actions.begin(), actions.end());
      allowed_.insert(flow_pair);
    }
  }
  decisions_.push_back(std::move(d));
}

bool Detector::before_forward(Simulator& sim, int switch_id, int in_port,
                              const simnet::Packet& pkt) {
  (void)in_port;
  auto it = blocked_until_.find(pkt.src_mac);
  if (it == blocked_until_.end()) return true;
  if (sim.now() < it->second) {
    sim.drop_packet(switch_id, pkt, "blocked src");
    return false;
  }
  blocked_until_.erase(it);  // block aged out; traffic flows again
  return true;
}

namespace {

const char* action_kind_name(MitigationAction::Kind kind) {
  switch (kind) {
    case MitigationAction::Kind::kDropFromMac: return "drop_from_mac";
    case MitigationAction::Kind::kBlockPort: return "block_port";
    case MitigationAction::Kind::kAllowFlow: return "allow";
  }
  return "?";
}

}  // namespace

std::string decision_log(const std::vector<WindowDecision>& decisions) {
  std::ostringstream out;
  for (const auto& d : decisions) {
    out << "window " << d.window << " [" << format_time(d.t0) << ","
        << format_time(d.t1) << ") pps=" << format_double(d.pps)
        << " suspicious=" << (d.suspicious ? 1 : 0) << " rows=" << d.rows_total
        << " malicious=" << d.rows_malicious << "\n";
    for (const auto& row : d.scored) {
      out << "row " << d.window << " src_mac=" << simnet::mac_to_string(row.key.src_mac)
          << " src_ip=" << simnet::ip_to_string(row.key.src_ip)
          << " dst_ip=" << simnet::ip_to_string(row.key.dst_ip)
          << " p=" << format_double(row.probability)
          << " label=" << (row.label == 1 ? "malicious" : "benign") << "\n";
    }
    for (const auto& a : d.actions) {
      out << "action " << d.window << " " << action_kind_name(a.kind)
          << " switch=" << a.switch_id;
      if (a.kind == MitigationAction::Kind::kAllowFlow) {
        out << " out_port=" << a.port
            << " src_ip=" << simnet::ip_to_string(*a.entry.match.src_ip)
            << " dst_ip=" << simnet::ip_to_string(*a.entry.match.dst_ip);
      } else {
        out << " port=" << a.port << " mac=" << simnet::mac_to_string(a.mac);
      }
      out << " prio=" << a.entry.priority << "\n";
    }
  }
  return out.str();
}

}  // namespace fasa::detect
