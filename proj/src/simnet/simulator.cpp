#include "fasa/simnet/simulator.hpp"

#include <sstream>
#include <stdexcept>
#include <utility>

namespace fasa::simnet {

Simulator::Simulator(Topology topology, SimConfig config)
    : topo_(std::move(topology)), config_(config) {
  if (config_.link_latency <= 0.0) {
    throw std::invalid_argument("link latency must be positive");
  }
  if (config_.sweep_interval <= 0.0) {
    throw std::invalid_argument("sweep interval must be positive");
  }
  if (config_.controller_tick < 0.0) {
    throw std::invalid_argument("controller tick must be >= 0");
  }
  tables_.resize(size_t(topo_.n_switches()));
  agents_.assign(size_t(topo_.n_hosts()) + 1, nullptr);
  if (config_.trace_reserve > 0) trace_.reserve(config_.trace_reserve);
  schedule_at(config_.sweep_interval, [this] { sweep(); });
  if (config_.controller_tick > 0.0) {
    schedule_at(config_.controller_tick, [this] { tick(); });
  }
}

const FlowTable& Simulator::table(int switch_id) const {
  if (switch_id < 0 || switch_id >= int(tables_.size())) {
    throw std::out_of_range("switch id out of range");
  }
  return tables_[size_t(switch_id)];
}

void Simulator::set_host_agent(int host_id, HostAgent* agent) {
  topo_.host(host_id);  // validates
  agents_[size_t(host_id)] = agent;
}

void Simulator::append(TraceRecord rec) {
  rec.time = now_;
  trace_.push_back(std::move(rec));
}

uint64_t Simulator::send_from_host(int host_id, Packet pkt) {
  const HostInfo& info = topo_.host(host_id);
  pkt.id = next_packet_id_++;
  pkt.timestamp = now_;
  counters_.generated += 1;

  TraceRecord rec;
  rec.kind = TraceKind::kGen;
  rec.switch_id = info.switch_id;
  rec.port = info.port;
  rec.has_packet = true;
  rec.packet = pkt;
  append(std::move(rec));

  int sw = info.switch_id;
  int port = info.port;
  schedule_in(config_.link_latency,
              [this, sw, port, pkt] { handle_at_switch(sw, port, pkt); });
  return pkt.id;
}

void Simulator::schedule_at(double time, std::function<void()> fn) {
  if (time < now_) {
    std::ostringstream msg;
    msg << "cannot schedule event at " << time << "; clock is at " << now_;
    throw std::invalid_argument(msg.str());
  }
  events_.push(Event{time, next_event_seq_++, std::move(fn)});
}

void Simulator::schedule_in(double delay, std::function<void()> fn) {
  if (delay < 0.0) throw std::invalid_argument("delay must be >= 0");
  schedule_at(now_ + delay, std::move(fn));
}

uint64_t Simulator::install_rule(int switch_id, FlowEntry entry) {
  if (switch_id < 0 || switch_id >= int(tables_.size())) {
    throw std::out_of_range("switch id out of range");
  }
  uint64_t seq = tables_[size_t(switch_id)].install(entry, now_);
  counters_.installs += 1;

  TraceRecord rec;
  rec.kind = TraceKind::kInstall;
  rec.switch_id = switch_id;
  rec.priority = entry.priority;
  rec.cookie = entry.cookie;
  std::ostringstream detail;
  detail << entry.match.describe() << "|";
  switch (entry.action) {
    case Action::kForward: detail << "forward:" << entry.out_port; break;
    case Action::kDrop: detail << "drop"; break;
    case Action::kController: detail << "controller"; break;
  }
  detail << "|prio=" << entry.priority << "|idle=" << entry.idle_timeout
         << "|hard=" << entry.hard_timeout;
  rec.detail = detail.str();
  append(std::move(rec));
  return seq;
}

void Simulator::packet_out(int switch_id, int out_port, const Packet& pkt) {
  forward(switch_id, out_port, pkt);
}

void Simulator::drop_packet(int switch_id, const Packet& pkt,
                            const std::string& reason) {
  counters_.dropped += 1;
  TraceRecord rec;
  rec.kind = TraceKind::kDrop;
  rec.switch_id = switch_id;
  rec.has_packet = true;
  rec.packet = pkt;
  rec.detail = reason;
  append(std::move(rec));
}

void Simulator::refuse(int host_id, const Packet& pkt,
                       const std::string& reason) {
  const HostInfo& info = topo_.host(host_id);
  counters_.refused += 1;
  TraceRecord rec;
  rec.kind = TraceKind::kRefuse;
  rec.switch_id = info.switch_id;
  rec.port = info.port;
  rec.has_packet = true;
  rec.packet = pkt;
  rec.detail = reason;
  append(std::move(rec));
}

void Simulator::handle_at_switch(int switch_id, int in_port,
                                 const Packet& pkt) {
  FlowTable& table = tables_[size_t(switch_id)];
  FlowEntry* entry = table.match(pkt, in_port, now_);
  if (entry) {
    counters_.matches += 1;
    TraceRecord rec;
    rec.kind = TraceKind::kMatch;
    rec.switch_id = switch_id;
    rec.port = in_port;
    rec.has_packet = true;
    rec.packet = pkt;
    rec.priority = entry->priority;
    rec.cookie = entry->cookie;
    switch (entry->action) {
      case Action::kForward: rec.detail = "forward"; break;
      case Action::kDrop: rec.detail = "drop"; break;
      // A send-to-controller match is followed by a packet-in record for the
      // same packet; window collection keys on the detail to count it once.
      case Action::kController: rec.detail = "controller"; break;
    }
    append(std::move(rec));

    switch (entry->action) {
      case Action::kForward:
        forward(switch_id, entry->out_port, pkt);
        return;
      case Action::kDrop:
        drop_packet(switch_id, pkt, "rule");
        return;
      case Action::kController:
        break;  // fall through to the packet-in path below
    }
  }

  counters_.packet_ins += 1;
  TraceRecord rec;
  rec.kind = TraceKind::kPacketIn;
  rec.switch_id = switch_id;
  rec.port = in_port;
  rec.has_packet = true;
  rec.packet = pkt;
  append(std::move(rec));
  if (controller_) {
    controller_->on_packet_in(*this, switch_id, in_port, pkt);
  } else {
    drop_packet(switch_id, pkt, "no controller");
  }
}

void Simulator::forward(int switch_id, int out_port, const Packet& pkt) {
  int peer = topo_.peer_switch(switch_id, out_port);
  if (peer >= 0) {
    int peer_in = peer < switch_id ? topo_.right_port(peer)
                                   : topo_.left_port(peer);
    schedule_in(config_.link_latency,
                [this, peer, peer_in, pkt] { handle_at_switch(peer, peer_in, pkt); });
    return;
  }
  // host port
  for (const auto& host : topo_.hosts()) {
    if (host.switch_id == switch_id && host.port == out_port) {
      int host_id = host.id;
      schedule_in(config_.link_latency,
                  [this, host_id, pkt] { deliver(host_id, pkt); });
      return;
    }
  }
  drop_packet(switch_id, pkt, "no such port");
}

void Simulator::deliver(int host_id, const Packet& pkt) {
  const HostInfo& info = topo_.host(host_id);
  counters_.delivered += 1;
  TraceRecord rec;
  rec.kind = TraceKind::kDeliver;
  rec.switch_id = info.switch_id;
  rec.port = info.port;
  rec.has_packet = true;
  rec.packet = pkt;
  append(std::move(rec));
  HostAgent* agent = agents_[size_t(host_id)];
  if (agent) agent->on_deliver(*this, pkt);
}

void Simulator::sweep() {
  for (int sw = 0; sw < int(tables_.size()); ++sw) {
    auto expired = tables_[size_t(sw)].expire(now_);
    for (auto& exp : expired) {
      counters_.expires += 1;
      TraceRecord rec;
      rec.kind = TraceKind::kExpire;
      rec.switch_id = sw;
      rec.priority = exp.entry.priority;
      rec.cookie = exp.entry.cookie;
      rec.detail = exp.entry.match.describe() + (exp.reason == ExpireReason::kIdle
                                                     ? "|idle"
                                                     : "|hard");
      append(std::move(rec));
      if (controller_) {
        controller_->on_flow_expired(*this, sw, exp.entry, exp.reason);
      }
    }
  }
  schedule_at(now_ + config_.sweep_interval, [this] { sweep(); });
}

void Simulator::tick() {
  if (controller_) controller_->on_tick(*this, now_);
  schedule_at(now_ + config_.controller_tick, [this] { tick(); });
}

void Simulator::run(double until) {
  if (until < now_) throw std::invalid_argument("run target is in the past");
  while (!events_.empty() && events_.top().time <= until) {
    Event ev = events_.top();
    events_.pop();
    now_ = ev.time;
    ev.fn();
  }
  now_ = until;
}

void RoutingController::on_packet_in(Simulator& sim, int switch_id,
                                     int in_port, const Packet& pkt) {
  if (!before_forward(sim, switch_id, in_port, pkt)) return;
  const Topology& topo = sim.topology();
  const HostInfo* dst = topo.host_by_ip(pkt.dst_ip);
  if (!dst) {
    sim.drop_packet(switch_id, pkt, "no route");
    return;
  }
  int out_port = dst->switch_id == switch_id
                     ? dst->port
                     : topo.forward_port(switch_id, dst->switch_id);
  sim.packet_out(switch_id, out_port, pkt);
}

}  // namespace fasa::simnet
