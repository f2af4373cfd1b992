#include "fasa/traffic/agents.hpp"

#include <algorithm>
#include <stdexcept>

namespace fasa::traffic {

using simnet::Packet;
using simnet::Simulator;

// ---------------------------------------------------------------- clients

ClientAgent::ClientAgent(const ScenarioConfig& config, const simnet::Topology& topo,
                         int host, uint64_t seed)
    : config_(&config),
      self_(topo.host(host)),
      server_(topo.host(config.server_host)),
      rng_(seed) {
  if (host == config.server_host) {
    throw std::invalid_argument("client agent cannot run on the server host");
  }
}

void ClientAgent::add_plan(const FlowPlan& plan) {
  if (plan.client_host != self_.id) {
    throw std::invalid_argument("flow plan belongs to another host");
  }
  plans_.push_back(plan);
}

void ClientAgent::start(Simulator& sim) {
  flows_.clear();
  flows_.resize(plans_.size());
  for (size_t i = 0; i < plans_.size(); ++i) {
    Flow& f = flows_[i];
    f.packets = plans_[i].packets == 0 ? -1 : plans_[i].packets;
    f.rate = plans_[i].rate;
    sim.schedule_at(plans_[i].start, [this, &sim, i] { send_syn(sim, i); });
  }
}

Packet ClientAgent::packet_to_server(uint16_t src_port, uint8_t flags, uint32_t size) const {
  Packet p;
  p.src_mac = self_.mac;
  p.dst_mac = server_.mac;
  p.src_ip = self_.ip;
  p.dst_ip = server_.ip;
  p.tcp_flags = flags;
  p.src_port = src_port;
  p.dst_port = kServerPort;
  p.size = size;
  return p;
}

void ClientAgent::send_syn(Simulator& sim, size_t idx) {
  Flow& f = flows_[idx];
  if (f.established || f.failed) return;
  if (f.syns_sent == 0) ++stats_.flows_started;
  ++f.syns_sent;
  sim.send_from_host(self_.id, packet_to_server(port_of(idx), simnet::tcp::kSyn, kSynBytes));
  sim.schedule_in(config_->retry_interval, [this, &sim, idx] {
    Flow& flow = flows_[idx];
    if (flow.established || flow.failed) return;
    if (flow.syns_sent <= config_->syn_retries) {
      send_syn(sim, idx);
    } else {
      flow.failed = true;
      ++stats_.flows_failed;
    }
  });
}

void ClientAgent::on_deliver(Simulator& sim, const Packet& pkt) {
  if (pkt.tcp_flags != (simnet::tcp::kSyn | simnet::tcp::kAck)) return;
  if (pkt.dst_port < 1024) return;
  const size_t idx = static_cast<size_t>(pkt.dst_port) - 1024;
  if (idx >= flows_.size()) return;
  Flow& f = flows_[idx];
  if (f.established || f.failed) return;  // duplicate or post-give-up reply
  f.established = true;
  ++stats_.flows_established;
  sim.send_from_host(self_.id, packet_to_server(port_of(idx), simnet::tcp::kAck, kAckBytes));
  if (f.packets != 0) {
    const double gap = f.packets < 0 ? 1.0 / f.rate : rng_.exponential(f.rate);
    sim.schedule_in(gap, [this, &sim, idx] { send_next_data(sim, idx); });
  }
}

void ClientAgent::send_next_data(Simulator& sim, size_t idx) {
  Flow& f = flows_[idx];
  if (f.packets == 0) return;
  const bool persistent = f.packets < 0;
  const uint32_t payload = persistent ? config_->data_bytes : config_->short_data_bytes;
  sim.send_from_host(self_.id, packet_to_server(port_of(idx),
                                                simnet::tcp::kPsh | simnet::tcp::kAck,
                                                kHeaderBytes + payload));
  ++stats_.data_packets;
  if (f.packets > 0) --f.packets;
  if (f.packets != 0) {
    const double gap = persistent ? 1.0 / f.rate : rng_.exponential(f.rate);
    sim.schedule_in(gap, [this, &sim, idx] { send_next_data(sim, idx); });
  }
}

// ----------------------------------------------------------------- server

ServerAgent::ServerAgent(const ScenarioConfig& config, const simnet::Topology& topo)
    : config_(&config), self_(topo.host(config.server_host)) {}

void ServerAgent::start(Simulator& sim) {
  sim.schedule_in(1.0, [this, &sim] { scan(sim); });
}

void ServerAgent::scan(Simulator& sim) {
  const double now = sim.now();
  for (auto it = half_open_.begin(); it != half_open_.end();) {
    if (it->second <= now) {
      it = half_open_.erase(it);
    } else {
      ++it;
    }
  }
  sim.schedule_in(1.0, [this, &sim] { scan(sim); });
}

void ServerAgent::send_syn_ack(Simulator& sim, const Packet& syn) {
  Packet p;
  p.src_mac = self_.mac;
  p.dst_mac = syn.src_mac;
  p.src_ip = self_.ip;
  p.dst_ip = syn.src_ip;
  p.tcp_flags = simnet::tcp::kSyn | simnet::tcp::kAck;
  p.src_port = kServerPort;
  p.dst_port = syn.src_port;
  p.size = kSynAckBytes;
  sim.send_from_host(self_.id, p);
}

void ServerAgent::on_deliver(Simulator& sim, const Packet& pkt) {
  if (pkt.dst_port != kServerPort) return;
  const bool syn = pkt.tcp_flags & simnet::tcp::kSyn;
  const bool ack = pkt.tcp_flags & simnet::tcp::kAck;
  const bool psh = pkt.tcp_flags & simnet::tcp::kPsh;
  const PeerKey key{pkt.src_ip, pkt.src_port};

  if (syn && !ack) {
    ++stats_.syn_received;
    if (established_.count(key)) {
      send_syn_ack(sim, pkt);  // stray retransmit
    } else if (auto it = half_open_.find(key); it != half_open_.end()) {
      it->second = sim.now() + config_->half_open_timeout;
      send_syn_ack(sim, pkt);
    } else if (half_open_.size() >= static_cast<size_t>(config_->half_open_capacity)) {
      sim.refuse(self_.id, pkt, "backlog full");
      ++stats_.syn_refused;
    } else {
      half_open_[key] = sim.now() + config_->half_open_timeout;
      stats_.half_open_peak = std::max<uint64_t>(stats_.half_open_peak, half_open_.size());
      send_syn_ack(sim, pkt);
    }
    return;
  }
  if (ack && !syn && !psh) {
    if (half_open_.erase(key) > 0) {
      established_.insert(key);
      ++stats_.established;
    }
    return;
  }
  if (psh) {
    ++stats_.data_packets;
    if (established_.count(key) && pkt.size > kHeaderBytes) {
      stats_.goodput_bytes += pkt.size - kHeaderBytes;
    }
  }
}

// --------------------------------------------------------------- attacker

AttackerAgent::AttackerAgent(const simnet::Topology& topo, int host, int server_host,
                             std::vector<SynEvent> events, GroundTruth* truth)
    : self_(topo.host(host)),
      server_(topo.host(server_host)),
      events_(std::move(events)),
      truth_(truth) {
  if (!truth_) throw std::invalid_argument("attacker agent needs a ground-truth sink");
}

void AttackerAgent::start(Simulator& sim) {
  if (events_.empty()) return;
  sim.schedule_at(events_[0].time, [this, &sim] { fire(sim, 0); });
}

void AttackerAgent::fire(Simulator& sim, size_t idx) {
  const SynEvent& e = events_[idx];
  Packet p;
  p.src_mac = self_.mac;  // real layer-2 identity
  p.dst_mac = server_.mac;
  p.src_ip = e.src_ip;  // spoofed
  p.dst_ip = server_.ip;
  p.tcp_flags = simnet::tcp::kSyn;
  p.src_port = e.src_port;
  p.dst_port = kServerPort;
  p.size = kSynBytes;
  const uint64_t id = sim.send_from_host(self_.id, p);
  truth_->attack_ids.insert(id);
  ++sent_;
  if (idx + 1 < events_.size()) {
    sim.schedule_at(events_[idx + 1].time, [this, &sim, idx] { fire(sim, idx + 1); });
  }
}

}  // namespace fasa::traffic
