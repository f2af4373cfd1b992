#pragma once

#include <cstdint>
#include <string>

namespace fasa::traffic {

// One self-contained experiment: a linear switch fabric, a server, benign
// clients (long-lived flows plus a Poisson stream of short ones), and one
// attacker flooding spoofed-source SYNs from attack_start onward.
struct ScenarioConfig {
  // fabric
  int n_switches = 8;
  int hosts_per_switch = 8;
  double link_latency = 0.001;  // seconds per hop

  // roles (host ids are 1-based; -1 monitored switch = the server's edge)
  int server_host = 1;
  int attacker_host = 60;
  int monitored_switch = -1;

  // benign load; defaults give a steady 100 Mbit/s baseline
  // (12 flows x 10 events/s x 104167 B x 8 bits).
  int persistent_flows = 12;
  double persistent_rate = 10.0;    // data events per second per flow
  uint32_t data_bytes = 104167;     // payload per persistent data event
  double short_flow_rate = 0.5;     // new short flows per second
  int short_flow_packets = 32;
  double short_packet_rate = 8.0;   // data packets per second per short flow
  uint32_t short_data_bytes = 1460; // payload per short-flow data packet

  // attack
  bool attack_enabled = true;
  double attack_start = 60.0;
  double attack_rate = 420.0;  // spoofed SYNs per second
  int spoof_pool = 10000;      // distinct spoofed source addresses

  // server SYN backlog
  int half_open_capacity = 1024;
  double half_open_timeout = 10.0;  // seconds until an unanswered SYN ages out

  // client handshake behavior
  int syn_retries = 3;
  double retry_interval = 1.0;

  // reporting
  double collection_interval = 5.0;        // timeline / detection window width
  double bandwidth_reference_mbps = 100.0; // plotted baseline, not a limit

  double duration = 140.0;
  uint64_t seed = 1;

  void validate() const;
};

std::string to_json(const ScenarioConfig& config);
ScenarioConfig scenario_from_json(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);

}  // namespace fasa::traffic
