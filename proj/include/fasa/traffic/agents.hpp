#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <unordered_set>
#include <utility>
#include <vector>

#include "fasa/common/rng.hpp"
#include "fasa/simnet/simulator.hpp"
#include "fasa/simnet/topology.hpp"
#include "fasa/traffic/generators.hpp"
#include "fasa/traffic/scenario.hpp"

namespace fasa::traffic {

// Wire-size model: fixed 66-byte TCP/IP/Ethernet header share per packet,
// 8 extra bytes of options on SYN and SYN/ACK.
inline constexpr uint32_t kHeaderBytes = 66;
inline constexpr uint32_t kSynBytes = 74;
inline constexpr uint32_t kSynAckBytes = 74;
inline constexpr uint32_t kAckBytes = 66;
inline constexpr uint16_t kServerPort = 80;

// Labels assigned at generation time, never inferred from the trace.
struct GroundTruth {
  std::unordered_set<uint64_t> attack_ids;
  uint64_t total_generated = 0;

  bool is_attack(uint64_t packet_id) const { return attack_ids.count(packet_id) > 0; }
  int label(uint64_t packet_id) const { return is_attack(packet_id) ? 1 : 0; }
};

struct ClientStats {
  int flows_started = 0;
  int flows_established = 0;
  int flows_failed = 0;  // SYN retries exhausted without a SYN/ACK
  uint64_t data_packets = 0;
};

// Runs every flow planned for one host: three-way handshake with retries,
// then a data stream. Long-lived flows (packets == 0) send at fixed
// intervals; short flows use exponential gaps.
class ClientAgent : public simnet::HostAgent {
 public:
  ClientAgent(const ScenarioConfig& config, const simnet::Topology& topo,
              int host, uint64_t seed);

  void add_plan(const FlowPlan& plan);
  void start(simnet::Simulator& sim);
  void on_deliver(simnet::Simulator& sim, const simnet::Packet& pkt) override;
  const ClientStats& stats() const { return stats_; }

 private:
  struct Flow {
    int packets = 0;  // remaining data packets; -1 once unbounded
    double rate = 1.0;
    int syns_sent = 0;
    bool established = false;
    bool failed = false;
  };

  void send_syn(simnet::Simulator& sim, size_t idx);
  void send_next_data(simnet::Simulator& sim, size_t idx);
  simnet::Packet packet_to_server(uint16_t src_port, uint8_t flags, uint32_t size) const;
  uint16_t port_of(size_t idx) const { return static_cast<uint16_t>(1024 + idx); }

  const ScenarioConfig* config_;
  simnet::HostInfo self_;
  simnet::HostInfo server_;
  Rng rng_;
  std::vector<FlowPlan> plans_;
  std::vector<Flow> flows_;
  ClientStats stats_;
};

struct ServerStats {
  uint64_t syn_received = 0;
  uint64_t syn_refused = 0;
  uint64_t established = 0;
  uint64_t data_packets = 0;
  uint64_t goodput_bytes = 0;  // payload bytes from established flows
  uint64_t half_open_peak = 0;
};

// Listens on port 80. Answers SYNs while the half-open table has room,
// silently refuses them when it is full, and ages unanswered entries out
// after half_open_timeout seconds.
class ServerAgent : public simnet::HostAgent {
 public:
  ServerAgent(const ScenarioConfig& config, const simnet::Topology& topo);

  void start(simnet::Simulator& sim);
  void on_deliver(simnet::Simulator& sim, const simnet::Packet& pkt) override;
  const ServerStats& stats() const { return stats_; }
  size_t half_open_size() const { return half_open_.size(); }
  bool is_established(simnet::Ip ip, uint16_t port) const {
    return established_.count({ip, port}) > 0;
  }

 private:
  using PeerKey = std::pair<simnet::Ip, uint16_t>;

  void scan(simnet::Simulator& sim);
  void send_syn_ack(simnet::Simulator& sim, const simnet::Packet& syn);

  const ScenarioConfig* config_;
  simnet::HostInfo self_;
  std::map<PeerKey, double> half_open_;  // peer -> ageout deadline
  std::set<PeerKey> established_;
  ServerStats stats_;
};

// Fires the precomputed spoofed-SYN schedule. Source IP varies per packet,
// source MAC stays the host's real one. Never acknowledges anything.
class AttackerAgent : public simnet::HostAgent {
 public:
  AttackerAgent(const simnet::Topology& topo, int host, int server_host,
                std::vector<SynEvent> events, GroundTruth* truth);

  void start(simnet::Simulator& sim);
  void on_deliver(simnet::Simulator& sim, const simnet::Packet& pkt) override {
    (void)sim;
    (void)pkt;  // replies go to spoofed addresses, never here
  }
  uint64_t sent() const { return sent_; }

 private:
  void fire(simnet::Simulator& sim, size_t idx);

  simnet::HostInfo self_;
  simnet::HostInfo server_;
  std::vector<SynEvent> events_;
  GroundTruth* truth_;
  uint64_t sent_ = 0;
};

}  // namespace fasa::traffic
