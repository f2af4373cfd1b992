#include "fasa/traffic/runner.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <sstream>
#include <stdexcept>

#include "fasa/common/text.hpp"

namespace fasa::traffic {

using simnet::TraceKind;

ScenarioResult run_scenario(const ScenarioConfig& config,
                            simnet::ControllerApp* controller,
                            double controller_tick) {
  config.validate();
  if (!controller) throw std::invalid_argument("run_scenario: controller required");

  auto topo = simnet::Topology::linear(config.n_switches, config.hosts_per_switch);
  simnet::SimConfig sim_config;
  sim_config.link_latency = config.link_latency;
  sim_config.controller_tick = controller_tick;
  simnet::Simulator sim(topo, sim_config);
  sim.set_controller(controller);

  GroundTruth truth;

  ServerAgent server(config, topo);
  sim.set_host_agent(config.server_host, &server);
  server.start(sim);

  Rng plan_rng(config.seed);
  auto plans = gen_benign(config, plan_rng);
  std::map<int, std::vector<FlowPlan>> plans_by_host;
  for (const auto& p : plans) plans_by_host[p.client_host].push_back(p);

  std::vector<std::unique_ptr<ClientAgent>> clients;
  for (const auto& [host, host_plans] : plans_by_host) {
    auto agent = std::make_unique<ClientAgent>(
        config, topo, host,
        config.seed ^ (0x9E3779B97F4A7C15ULL * static_cast<uint64_t>(host)));
    for (const auto& p : host_plans) agent->add_plan(p);
    sim.set_host_agent(host, agent.get());
    agent->start(sim);
    clients.push_back(std::move(agent));
  }

  std::unique_ptr<AttackerAgent> attacker;
  if (config.attack_enabled) {
    Rng attack_rng(config.seed ^ 0xA77AC4ULL);
    auto events = gen_synflood(config, attack_rng);
    attacker = std::make_unique<AttackerAgent>(topo, config.attacker_host,
                                               config.server_host,
                                               std::move(events), &truth);
    sim.set_host_agent(config.attacker_host, attacker.get());
    attacker->start(sim);
  }

  sim.run(config.duration);

  ScenarioResult result;
  result.counters = sim.counters();
  result.trace = sim.release_trace();
  result.topology = sim.topology();
  result.server_host = config.server_host;
  result.monitored_switch = config.monitored_switch >= 0
                                ? config.monitored_switch
                                : result.topology.host(config.server_host).switch_id;
  result.attacker_mac = result.topology.host(config.attacker_host).mac;

  truth.total_generated = result.counters.generated;
  result.truth = std::move(truth);

  for (const auto& c : clients) {
    result.clients.flows_started += c->stats().flows_started;
    result.clients.flows_established += c->stats().flows_established;
    result.clients.flows_failed += c->stats().flows_failed;
    result.clients.data_packets += c->stats().data_packets;
  }
  result.server = server.stats();
  result.attack_packets_sent = attacker ? attacker->sent() : 0;

  result.timeline = build_timeline(result.trace, result.truth, result.topology,
                                   result.server_host, result.monitored_switch,
                                   config.collection_interval, config.duration);
  return result;
}

namespace {

bool is_benign_data_delivery(const simnet::TraceRecord& rec, const GroundTruth& truth,
                             int server_switch, int server_port) {
  return rec.kind == TraceKind::kDeliver && rec.switch_id == server_switch &&
         rec.port == server_port && rec.has_packet &&
         (rec.packet.tcp_flags & simnet::tcp::kPsh) &&
         rec.packet.size > kHeaderBytes && !truth.is_attack(rec.packet.id);
}

}  // namespace

uint64_t goodput_bytes(const simnet::Trace& trace, const GroundTruth& truth,
                       const simnet::Topology& topo, int host, double t0, double t1) {
  const auto& info = topo.host(host);
  uint64_t bytes = 0;
  for (const auto& rec : trace) {
    if (rec.time < t0 || rec.time >= t1) continue;
    if (is_benign_data_delivery(rec, truth, info.switch_id, info.port)) {
      bytes += rec.packet.size - kHeaderBytes;
    }
  }
  return bytes;
}

std::vector<IntervalStats> build_timeline(const simnet::Trace& trace,
                                          const GroundTruth& truth,
                                          const simnet::Topology& topo,
                                          int server_host, int monitored_switch,
                                          double interval, double duration) {
  if (interval <= 0.0 || duration <= 0.0) {
    throw std::invalid_argument("timeline: interval and duration must be positive");
  }
  const auto& server = topo.host(server_host);
  const size_t n = static_cast<size_t>(std::ceil(duration / interval - 1e-9));
  std::vector<IntervalStats> timeline(n);
  for (size_t i = 0; i < n; ++i) {
    timeline[i].t0 = static_cast<double>(i) * interval;
    timeline[i].t1 = std::min(duration, timeline[i].t0 + interval);
  }
  for (const auto& rec : trace) {
    if (rec.time < 0.0 || rec.time >= duration) continue;
    const size_t i = std::min(n - 1, static_cast<size_t>(rec.time / interval));
    if (simnet::seen_at_switch(rec, monitored_switch)) {
      timeline[i].packets_seen += 1;
      if (truth.is_attack(rec.packet.id)) {
        timeline[i].attack_seen += 1;
      } else {
        timeline[i].benign_seen += 1;
      }
    }
    if (is_benign_data_delivery(rec, truth, server.switch_id, server.port)) {
      timeline[i].delivered_payload_bytes += rec.packet.size - kHeaderBytes;
    }
  }
  for (auto& iv : timeline) {
    const double width = iv.t1 - iv.t0;
    iv.pps = width > 0.0 ? static_cast<double>(iv.packets_seen) / width : 0.0;
    iv.mbps = width > 0.0
                  ? static_cast<double>(iv.delivered_payload_bytes) * 8.0 / width / 1e6
                  : 0.0;
  }
  return timeline;
}

std::string timeline_to_csv(const std::vector<IntervalStats>& timeline) {
  std::ostringstream out;
  out << "t0,t1,pps,mbps,benign,attack\n";
  for (const auto& iv : timeline) {
    out << format_double(iv.t0) << "," << format_double(iv.t1) << ","
        << format_double(iv.pps) << "," << format_double(iv.mbps) << ","
        << iv.benign_seen << "," << iv.attack_seen << "\n";
  }
  return out.str();
}

}  // namespace fasa::traffic
