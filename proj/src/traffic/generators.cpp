#include "fasa/traffic/generators.hpp"

#include <algorithm>

namespace fasa::traffic {

std::vector<FlowPlan> gen_benign(const ScenarioConfig& config, Rng& rng) {
  config.validate();
  std::vector<int> clients;
  const int n_hosts = config.n_switches * config.hosts_per_switch;
  for (int h = 1; h <= n_hosts; ++h) {
    if (h != config.server_host && h != config.attacker_host) clients.push_back(h);
  }

  std::vector<FlowPlan> plans;
  // Long-lived flows start staggered inside the first two seconds so their
  // data streams are desynchronized from the first window boundary.
  for (int i = 0; i < config.persistent_flows; ++i) {
    FlowPlan p;
    p.client_host = clients[static_cast<size_t>(i) % clients.size()];
    p.start = rng.uniform(0.0, 2.0);
    p.packets = 0;
    p.rate = config.persistent_rate;
    plans.push_back(p);
  }

  // Short flows arrive over [2, duration - 5); the tail margin leaves the last
  // arrivals enough time to finish their handshake inside the run.
  if (config.short_flow_rate > 0.0) {
    double t = 2.0;
    const double horizon = std::max(2.0, config.duration - 5.0);
    while (true) {
      t += rng.exponential(config.short_flow_rate);
      if (t >= horizon) break;
      FlowPlan p;
      p.client_host = clients[static_cast<size_t>(rng.below(clients.size()))];
      p.start = t;
      p.packets = config.short_flow_packets;
      p.rate = config.short_packet_rate;
      plans.push_back(p);
    }
  }
  return plans;
}

simnet::Ip spoof_base() { return simnet::make_ip(198, 18, 0, 1); }

std::vector<SynEvent> gen_synflood(const ScenarioConfig& config, Rng& rng) {
  config.validate();
  std::vector<SynEvent> events;
  events.reserve(static_cast<size_t>((config.duration - config.attack_start) * config.attack_rate * 1.2));
  double t = config.attack_start;
  while (true) {
    t += rng.exponential(config.attack_rate);
    if (t >= config.duration) break;
    SynEvent e;
    e.time = t;
    e.src_ip = spoof_base() + static_cast<simnet::Ip>(rng.below(static_cast<uint64_t>(config.spoof_pool)));
    e.src_port = static_cast<uint16_t>(1024 + rng.below(60000));
    events.push_back(e);
  }
  return events;
}

}  // namespace fasa::traffic
