#include "fasa/simnet/flow_table.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace fasa::simnet {

bool FlowMatch::matches(const Packet& pkt, int port) const {
  if (src_mac && *src_mac != pkt.src_mac) return false;
  if (dst_mac && *dst_mac != pkt.dst_mac) return false;
  if (src_ip && *src_ip != pkt.src_ip) return false;
  if (dst_ip && *dst_ip != pkt.dst_ip) return false;
  if (in_port && *in_port != port) return false;
  if (!flags.matches(pkt.tcp_flags)) return false;
  return true;
}

void FlowMatch::validate() const {
  if (match_all) return;
  if (!src_mac && !dst_mac && !src_ip && !dst_ip && !in_port &&
      flags.mask == 0) {
    throw std::invalid_argument(
        "flow match constrains no field; set match_all for a wildcard entry");
  }
}

std::string FlowMatch::describe() const {
  std::ostringstream out;
  bool any = false;
  auto sep = [&] {
    if (any) out << ",";
    any = true;
  };
  if (src_mac) {
    sep();
    out << "src_mac=" << mac_to_string(*src_mac);
  }
  if (dst_mac) {
    sep();
    out << "dst_mac=" << mac_to_string(*dst_mac);
  }
  if (src_ip) {
    sep();
    out << "src_ip=" << ip_to_string(*src_ip);
  }
  if (dst_ip) {
    sep();
    out << "dst_ip=" << ip_to_string(*dst_ip);
  }
  if (in_port) {
    sep();
    out << "in_port=" << *in_port;
  }
  if (flags.mask != 0) {
    sep();
    out << "flags=" << unsigned(flags.value) << "/" << unsigned(flags.mask);
  }
  if (!any) out << (match_all ? "*" : "<empty>");
  return out.str();
}

namespace {
bool same_match(const FlowMatch& a, const FlowMatch& b) {
  return a.src_mac == b.src_mac && a.dst_mac == b.dst_mac &&
         a.src_ip == b.src_ip && a.dst_ip == b.dst_ip &&
         a.in_port == b.in_port && a.flags.mask == b.flags.mask &&
         a.flags.value == b.flags.value && a.match_all == b.match_all;
}
}  // namespace

bool FlowTable::expired(const FlowEntry& entry, double now) {
  if (entry.hard_timeout > 0.0 &&
      now >= entry.installed_at + entry.hard_timeout) {
    return true;
  }
  if (entry.idle_timeout > 0.0 && now >= entry.last_used + entry.idle_timeout) {
    return true;
  }
  return false;
}

uint64_t FlowTable::install(FlowEntry entry, double now) {
  entry.match.validate();
  entry.seq = next_seq_++;
  entry.installed_at = now;
  entry.last_used = now;
  entry.packet_hits = 0;
  entry.byte_hits = 0;
  for (auto& existing : entries_) {
    if (existing.priority == entry.priority &&
        same_match(existing.match, entry.match)) {
      existing = entry;
      return entry.seq;
    }
  }
  entries_.push_back(entry);
  return entry.seq;
}

FlowEntry* FlowTable::match(const Packet& pkt, int in_port, double now) {
  FlowEntry* best = nullptr;
  for (auto& entry : entries_) {
    if (expired(entry, now)) continue;
    if (!entry.match.matches(pkt, in_port)) continue;
    if (!best || entry.priority > best->priority ||
        (entry.priority == best->priority && entry.seq < best->seq)) {
      best = &entry;
    }
  }
  if (best) {
    best->last_used = now;
    best->packet_hits += 1;
    best->byte_hits += pkt.size;
  }
  return best;
}

std::vector<ExpiredEntry> FlowTable::expire(double now) {
  std::vector<ExpiredEntry> out;
  std::vector<FlowEntry> kept;
  kept.reserve(entries_.size());
  for (auto& entry : entries_) {
    if (!expired(entry, now)) {
      kept.push_back(entry);
      continue;
    }
    ExpireReason reason = ExpireReason::kIdle;
    if (entry.hard_timeout > 0.0 &&
        now >= entry.installed_at + entry.hard_timeout) {
      reason = ExpireReason::kHard;
    }
    out.push_back({entry, reason});
  }
  entries_ = std::move(kept);
  return out;
}

}  // namespace fasa::simnet
