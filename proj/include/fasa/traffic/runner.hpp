#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fasa/simnet/simulator.hpp"
#include "fasa/simnet/topology.hpp"
#include "fasa/simnet/trace.hpp"
#include "fasa/traffic/agents.hpp"
#include "fasa/traffic/scenario.hpp"

namespace fasa::traffic {

// One collection interval of the run, as seen at the monitored switch and
// the server. Suitable for plotting the attack/mitigation timeline.
struct IntervalStats {
  double t0 = 0.0;
  double t1 = 0.0;
  uint64_t packets_seen = 0;   // at the monitored switch
  uint64_t benign_seen = 0;
  uint64_t attack_seen = 0;
  double pps = 0.0;
  uint64_t delivered_payload_bytes = 0;  // benign payload delivered to server
  double mbps = 0.0;
};

struct ScenarioResult {
  simnet::Trace trace;
  simnet::SimCounters counters;
  GroundTruth truth;
  simnet::Topology topology;
  std::vector<IntervalStats> timeline;

  // resolved roles
  int server_host = 0;
  int monitored_switch = 0;
  simnet::Mac attacker_mac = 0;

  // endpoint bookkeeping
  ClientStats clients;
  ServerStats server;
  uint64_t attack_packets_sent = 0;
};

// Builds the fabric, wires the agents, and runs the configured scenario
// against the given controller. controller_tick > 0 enables periodic
// ControllerApp::on_tick callbacks (the detection window driver).
ScenarioResult run_scenario(const ScenarioConfig& config,
                            simnet::ControllerApp* controller,
                            double controller_tick = 0.0);

// Payload bytes of benign data packets delivered to `host` in [t0, t1).
uint64_t goodput_bytes(const simnet::Trace& trace, const GroundTruth& truth,
                       const simnet::Topology& topo, int host, double t0, double t1);

// Per-interval series over [0, duration): packets seen at the monitored
// switch split by ground-truth class, plus benign payload delivered to the
// server expressed in Mbit/s.
std::vector<IntervalStats> build_timeline(const simnet::Trace& trace,
                                          const GroundTruth& truth,
                                          const simnet::Topology& topo,
                                          int server_host, int monitored_switch,
                                          double interval, double duration);

// CSV emission of the timeline (header: t0,t1,pps,mbps,benign,attack).
std::string timeline_to_csv(const std::vector<IntervalStats>& timeline);

}  // namespace fasa::traffic
