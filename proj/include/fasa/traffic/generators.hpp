#pragma once

#include <cstdint>
#include <vector>

#include "fasa/common/rng.hpp"
#include "fasa/simnet/packet.hpp"
#include "fasa/traffic/scenario.hpp"

namespace fasa::traffic {

// One client-side TCP flow to the server. packets == 0 means the flow keeps
// sending until the run ends.
struct FlowPlan {
  int client_host = 0;
  double start = 0.0;
  int packets = 0;
  double rate = 1.0;  // data packets per second once established
};

// Deterministic benign workload: `persistent_flows` long-lived flows spread
// round-robin over the non-server, non-attacker hosts, plus short flows
// arriving as a Poisson process until shortly before the run ends.
std::vector<FlowPlan> gen_benign(const ScenarioConfig& config, Rng& rng);

// One spoofed-source SYN.
struct SynEvent {
  double time = 0.0;
  simnet::Ip src_ip = 0;
  uint16_t src_port = 0;
};

// Poisson SYN flood from attack_start to the end of the run. Source addresses
// are drawn from a pool of `spoof_pool` addresses outside the fabric's subnet.
std::vector<SynEvent> gen_synflood(const ScenarioConfig& config, Rng& rng);

// First address of the spoofed-source pool (the benchmarking range
// 198.18.0.0/15, which can never collide with fabric hosts in 10.0.0.0/24).
simnet::Ip spoof_base();

}  // namespace fasa::traffic
