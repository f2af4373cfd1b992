#pragma once

#include <string>
#include <vector>

#include "fasa/simnet/packet.hpp"

namespace fasa::simnet {

struct HostInfo {
  int id = 0;        // 1-based
  int switch_id = 0;  // 0-based
  int port = 0;       // port on that switch
  Mac mac = 0;
  Ip ip = 0;
};

// Linear chain of switches, each with a fixed number of directly attached
// hosts. Port layout per switch: ports 1..hosts_per_switch go to hosts,
// the next port goes to the left neighbor (if any), then the right neighbor.
class Topology {
 public:
  static Topology linear(int n_switches, int hosts_per_switch);

  int n_switches() const { return n_switches_; }
  int hosts_per_switch() const { return hosts_per_switch_; }
  int n_hosts() const { return int(hosts_.size()); }

  const std::vector<HostInfo>& hosts() const { return hosts_; }
  const HostInfo& host(int host_id) const;  // 1-based
  const HostInfo* host_by_mac(Mac mac) const;
  const HostInfo* host_by_ip(Ip ip) const;

  // Port on `switch_id` leading one hop toward `dst_switch` (or to the local
  // host port when the destination host lives on this switch).
  int forward_port(int switch_id, int dst_switch) const;
  int host_port(int switch_id, int host_id) const;
  int left_port(int switch_id) const;   // -1 when no left neighbor
  int right_port(int switch_id) const;  // -1 when no right neighbor

  // Which switch is on the other side of `port` on `switch_id`;
  // -1 when the port is a host port.
  int peer_switch(int switch_id, int port) const;

 private:
  int n_switches_ = 0;
  int hosts_per_switch_ = 0;
  std::vector<HostInfo> hosts_;
};

}  // namespace fasa::simnet
