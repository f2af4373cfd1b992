#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "fasa/anfis/model.hpp"
#include "fasa/detect/window.hpp"
#include "fasa/simnet/simulator.hpp"

namespace fasa::detect {

struct DetectorConfig {
  int monitored_switch = 0;
  double collection_interval = 5.0;
  double pps_threshold = 700.0;

  // Block rules: drop everything from the attacker's MAC and everything
  // entering through the attacker's switch port.
  int block_priority = 1000;
  double block_idle = 0.0;
  double block_hard = 300.0;

  // Allow rules: forward entries for flows classified benign.
  int allow_priority = 10;
  double allow_idle = 200.0;
  double allow_hard = 400.0;

  bool mitigation = true;

  void validate() const;
};

struct MitigationAction {
  enum class Kind : uint8_t { kDropFromMac, kBlockPort, kAllowFlow };

  Kind kind = Kind::kAllowFlow;
  int switch_id = -1;
  int port = -1;
  simnet::Mac mac = 0;
  simnet::FlowEntry entry;  // as installed
};

struct ScoredRow {
  FlowKey key;
  uint64_t first_packet_id = 0;
  double probability = 0.0;
  int label = 0;  // 1 = malicious
};

struct WindowDecision {
  int window = 0;  // 0-based index
  double t0 = 0.0;
  double t1 = 0.0;
  double pps = 0.0;
  bool suspicious = false;
  uint64_t rows_total = 0;
  uint64_t rows_malicious = 0;
  std::vector<ScoredRow> scored;          // filled only for suspicious windows
  std::vector<MitigationAction> actions;  // rule installs this window caused
};

// MAC responsible for the malicious rows: most distinct source IPs, then
// most packets, then lowest MAC. Empty input is an error.
simnet::Mac identify_attacker(const std::vector<FlowRow>& malicious_rows);

// Installs the block pair on the attacker's edge switch: a drop entry for the
// MAC and a drop entry for its ingress port, both with the block timers.
// A MAC without a known host location is an error.
std::vector<MitigationAction> mitigate(simnet::Mac mac, simnet::Simulator& sim,
                                       const DetectorConfig& config);

// Installs forward entries for (src_ip -> dst_ip) on every switch along the
// path, so the flow stops visiting the controller. Unroutable endpoints are
// an error.
std::vector<MitigationAction> allow_flow(const FlowKey& key, simnet::Simulator& sim,
                                         const DetectorConfig& config);

// Windowed detection loop on top of hop-by-hop routing. Every collection
// interval it aggregates the monitored switch's traffic, gates on the
// serving-capacity threshold, classifies each flow row with the model, and
// (with mitigation on) blocks the identified attacker and whitelists benign
// flows. Packets from a currently blocked MAC are dropped at packet-in.
class Detector : public simnet::RoutingController {
 public:
  Detector(const anfis::AnfisModel* model, DetectorConfig config);

  void on_tick(simnet::Simulator& sim, double now) override;

  const DetectorConfig& config() const { return config_; }
  const std::vector<WindowDecision>& decisions() const { return decisions_; }
  // MAC -> block deadline; entries persist until observed expired.
  const std::map<simnet::Mac, double>& blocked() const { return blocked_until_; }

 protected:
  bool before_forward(simnet::Simulator& sim, int switch_id, int in_port,
                      const simnet::Packet& pkt) override;

 private:
  void process_window(simnet::Simulator& sim, WindowStats window);

  const anfis::AnfisModel* model_;
  DetectorConfig config_;
  size_t cursor_ = 0;
  int next_window_ = 0;
  std::map<simnet::Mac, double> blocked_until_;
  std::set<std::pair<simnet::Ip, simnet::Ip>> allowed_;
  std::vector<WindowDecision> decisions_;
};

// Line-delimited decision log: one "window" line per interval, one "row"
// line per scored flow, one "action" line per installed rule.
std::string decision_log(const std::vector<WindowDecision>& decisions);

}  // namespace fasa::detect
