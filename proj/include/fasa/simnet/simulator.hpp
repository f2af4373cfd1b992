#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <vector>

#include "fasa/simnet/flow_table.hpp"
#include "fasa/simnet/packet.hpp"
#include "fasa/simnet/topology.hpp"
#include "fasa/simnet/trace.hpp"

namespace fasa::simnet {

class Simulator;

// Control plane. on_packet_in owns the packet's fate: it must either
// packet_out() or drop_packet(), otherwise the packet silently vanishes
// and conservation checks fail.
class ControllerApp {
 public:
  virtual ~ControllerApp() = default;
  virtual void on_packet_in(Simulator& sim, int switch_id, int in_port,
                            const Packet& pkt) = 0;
  virtual void on_flow_expired(Simulator& sim, int switch_id,
                               const FlowEntry& entry, ExpireReason reason) {
    (void)sim;
    (void)switch_id;
    (void)entry;
    (void)reason;
  }
  virtual void on_tick(Simulator& sim, double now) {
    (void)sim;
    (void)now;
  }
};

class HostAgent {
 public:
  virtual ~HostAgent() = default;
  virtual void on_deliver(Simulator& sim, const Packet& pkt) = 0;
};

struct SimConfig {
  double link_latency = 0.001;    // seconds per hop
  double sweep_interval = 1.0;    // flow-table expiry sweep period
  double controller_tick = 0.0;   // 0 disables on_tick
  size_t trace_reserve = 0;
};

struct SimCounters {
  uint64_t generated = 0;
  uint64_t delivered = 0;
  uint64_t dropped = 0;
  uint64_t refused = 0;
  uint64_t packet_ins = 0;
  uint64_t matches = 0;
  uint64_t installs = 0;
  uint64_t expires = 0;

  uint64_t in_flight() const { return generated - delivered - dropped; }
};

// Deterministic discrete-event fabric: switches with flow tables, hosts on
// edge ports, one logical controller. Events at equal times run in the
// order they were scheduled.
class Simulator {
 public:
  Simulator(Topology topology, SimConfig config = {});

  double now() const { return now_; }
  const Topology& topology() const { return topo_; }
  const SimConfig& config() const { return config_; }
  const Trace& trace() const { return trace_; }
  // Moves the accumulated trace out; the simulator keeps an empty one.
  Trace release_trace() { return std::move(trace_); }
  const SimCounters& counters() const { return counters_; }
  const FlowTable& table(int switch_id) const;

  void set_controller(ControllerApp* controller) { controller_ = controller; }
  void set_host_agent(int host_id, HostAgent* agent);

  // Stamps id and timestamp, records generation, and puts the packet on the
  // wire toward the host's edge switch. Returns the assigned packet id.
  uint64_t send_from_host(int host_id, Packet pkt);

  void schedule_at(double time, std::function<void()> fn);
  void schedule_in(double delay, std::function<void()> fn);

  // Control-plane verbs.
  uint64_t install_rule(int switch_id, FlowEntry entry);
  void packet_out(int switch_id, int out_port, const Packet& pkt);
  void drop_packet(int switch_id, const Packet& pkt, const std::string& reason);

  // Host-side refusal annotation (connection not accepted). The packet
  // itself was already delivered; this only marks the outcome.
  void refuse(int host_id, const Packet& pkt, const std::string& reason);

  // Runs all events with time <= until, then advances the clock to until.
  void run(double until);

 private:
  struct Event {
    double time;
    uint64_t seq;
    std::function<void()> fn;
  };
  struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
      if (a.time != b.time) return a.time > b.time;
      return a.seq > b.seq;
    }
  };

  void handle_at_switch(int switch_id, int in_port, const Packet& pkt);
  void forward(int switch_id, int out_port, const Packet& pkt);
  void deliver(int host_id, const Packet& pkt);
  void sweep();
  void tick();
  void append(TraceRecord rec);

  Topology topo_;
  SimConfig config_;
  std::vector<FlowTable> tables_;
  std::vector<HostAgent*> agents_;
  ControllerApp* controller_ = nullptr;
  std::priority_queue<Event, std::vector<Event>, EventAfter> events_;
  Trace trace_;
  SimCounters counters_;
  double now_ = 0.0;
  uint64_t next_event_seq_ = 0;
  uint64_t next_packet_id_ = 1;
};

// Forwards every packet-in one hop along the line toward its destination
// IP without installing rules; unroutable destinations are dropped. The
// hook lets subclasses veto or observe packets before forwarding.
class RoutingController : public ControllerApp {
 public:
  void on_packet_in(Simulator& sim, int switch_id, int in_port,
                    const Packet& pkt) override;

 protected:
  // Return false to take ownership of the packet's fate.
  virtual bool before_forward(Simulator& sim, int switch_id, int in_port,
                              const Packet& pkt) {
    (void)sim;
    (void)switch_id;
    (void)in_port;
    (void)pkt;
    return true;
  }
};

}  // namespace fasa::simnet
