#include "fasa/simnet/topology.hpp"

#include <stdexcept>
#include <string>

namespace fasa::simnet {

Topology Topology::linear(int n_switches, int hosts_per_switch) {
  if (n_switches < 1) throw std::invalid_argument("need at least one switch");
  if (hosts_per_switch < 1) {
    throw std::invalid_argument("need at least one host per switch");
  }
  if (n_switches * hosts_per_switch > 200) {
    throw std::invalid_argument("topology too large: host IPs live in 10.0.0.0/24");
  }
  Topology topo;
  topo.n_switches_ = n_switches;
  topo.hosts_per_switch_ = hosts_per_switch;
  int host_id = 1;
  for (int sw = 0; sw < n_switches; ++sw) {
    for (int h = 0; h < hosts_per_switch; ++h) {
      HostInfo info;
      info.id = host_id;
      info.switch_id = sw;
      info.port = h + 1;
      info.mac = Mac(host_id);
      info.ip = make_ip(10, 0, 0, uint32_t(host_id));
      topo.hosts_.push_back(info);
      ++host_id;
    }
  }
  return topo;
}

const HostInfo& Topology::host(int host_id) const {
  if (host_id < 1 || host_id > n_hosts()) {
    throw std::out_of_range("no host " + std::to_string(host_id));
  }
  return hosts_[size_t(host_id - 1)];
}

const HostInfo* Topology::host_by_mac(Mac mac) const {
  if (mac < 1 || mac > Mac(n_hosts())) return nullptr;
  return &hosts_[size_t(mac - 1)];
}

const HostInfo* Topology::host_by_ip(Ip ip) const {
  Ip base = make_ip(10, 0, 0, 0);
  if ((ip & 0xffffff00u) != base) return nullptr;
  uint32_t last = ip & 0xffu;
  if (last < 1 || last > uint32_t(n_hosts())) return nullptr;
  return &hosts_[size_t(last - 1)];
}

int Topology::left_port(int switch_id) const {
  if (switch_id <= 0) return -1;
  return hosts_per_switch_ + 1;
}

int Topology::right_port(int switch_id) const {
  if (switch_id >= n_switches_ - 1) return -1;
  // The leftmost switch has no left port, so its right link uses the slot
  // the left link would otherwise take.
  return switch_id == 0 ? hosts_per_switch_ + 1 : hosts_per_switch_ + 2;
}

int Topology::host_port(int switch_id, int host_id) const {
  const HostInfo& info = host(host_id);
  if (info.switch_id != switch_id) {
    throw std::invalid_argument("host " + std::to_string(host_id) +
                                " is not on switch " + std::to_string(switch_id));
  }
  return info.port;
}

int Topology::forward_port(int switch_id, int dst_switch) const {
  if (switch_id < 0 || switch_id >= n_switches_ || dst_switch < 0 ||
      dst_switch >= n_switches_) {
    throw std::out_of_range("switch id out of range");
  }
  if (dst_switch == switch_id) {
    throw std::invalid_argument("destination is local; use host_port");
  }
  return dst_switch < switch_id ? left_port(switch_id) : right_port(switch_id);
}

int Topology::peer_switch(int switch_id, int port) const {
  if (port == left_port(switch_id)) return switch_id - 1;
  if (port == right_port(switch_id)) return switch_id + 1;
  return -1;
}

}  // namespace fasa::simnet
