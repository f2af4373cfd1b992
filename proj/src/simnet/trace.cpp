#include "fasa/simnet/trace.hpp"

#include <fstream>
#include <ostream>
#include <stdexcept>

#include "fasa/common/text.hpp"

namespace fasa::simnet {

const char* trace_kind_name(TraceKind kind) {
  switch (kind) {
    case TraceKind::kGen: return "gen";
    case TraceKind::kMatch: return "match";
    case TraceKind::kPacketIn: return "packet_in";
    case TraceKind::kDrop: return "drop";
    case TraceKind::kDeliver: return "deliver";
    case TraceKind::kInstall: return "install";
    case TraceKind::kExpire: return "expire";
    case TraceKind::kRefuse: return "refuse";
  }
  return "?";
}

std::string tcp_flags_string(uint8_t flags) {
  std::string out;
  if (flags & tcp::kSyn) out += 'S';
  if (flags & tcp::kAck) out += 'A';
  if (flags & tcp::kFin) out += 'F';
  if (flags & tcp::kRst) out += 'R';
  if (flags & tcp::kPsh) out += 'P';
  if (out.empty()) out = "-";
  return out;
}

bool seen_at_switch(const TraceRecord& rec, int switch_id) {
  if (rec.switch_id != switch_id || !rec.has_packet) return false;
  if (rec.kind == TraceKind::kPacketIn) return true;
  return rec.kind == TraceKind::kMatch && rec.detail != "controller";
}

void write_trace(std::ostream& out, const Trace& trace) {
  out << "time kind switch port id src_mac dst_mac src_ip dst_ip flags size detail\n";
  for (const auto& rec : trace) {
    out << format_time(rec.time) << ' ' << trace_kind_name(rec.kind)
        << ' ' << rec.switch_id << ' ' << rec.port << ' ';
    if (rec.has_packet) {
      const Packet& p = rec.packet;
      out << p.id << ' ' << mac_to_string(p.src_mac) << ' '
          << mac_to_string(p.dst_mac) << ' ' << ip_to_string(p.src_ip) << ' '
          << ip_to_string(p.dst_ip) << ' ' << tcp_flags_string(p.tcp_flags)
          << ' ' << p.size;
    } else {
      out << "- - - - - - -";
    }
    out << ' ' << (rec.detail.empty() ? "-" : rec.detail) << '\n';
  }
}

void save_trace(const std::string& path, const Trace& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_trace(out, trace);
  if (!out) throw std::runtime_error("failed writing " + path);
}

}  // namespace fasa::simnet
