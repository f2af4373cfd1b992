#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fasa/simnet/packet.hpp"

namespace fasa::simnet {

// Match on TCP flags: every bit set in `mask` must equal the corresponding
// bit in `value`. mask == 0 matches any flags.
struct FlagsMask {
  uint8_t mask = 0;
  uint8_t value = 0;
  bool matches(uint8_t flags) const { return (flags & mask) == value; }
};

struct FlowMatch {
  std::optional<Mac> src_mac;
  std::optional<Mac> dst_mac;
  std::optional<Ip> src_ip;
  std::optional<Ip> dst_ip;
  std::optional<int> in_port;
  FlagsMask flags;
  bool match_all = false;  // wildcard entry; field constraints still apply

  bool matches(const Packet& pkt, int port) const;
  // A match must constrain something unless it is explicitly match_all.
  void validate() const;
  std::string describe() const;
};

enum class Action : uint8_t { kForward, kDrop, kController };

struct FlowEntry {
  FlowMatch match;
  Action action = Action::kForward;
  int out_port = -1;  // used when action == kForward
  int priority = 0;
  double idle_timeout = 0.0;  // seconds; 0 means never idle-expires
  double hard_timeout = 0.0;  // seconds; 0 means never hard-expires
  uint64_t cookie = 0;        // caller-chosen tag, reported on expiry

  // bookkeeping, maintained by FlowTable
  uint64_t seq = 0;         // installation order, breaks priority ties
  double installed_at = 0.0;
  double last_used = 0.0;
  uint64_t packet_hits = 0;
  uint64_t byte_hits = 0;
};

enum class ExpireReason : uint8_t { kIdle, kHard };

struct ExpiredEntry {
  FlowEntry entry;
  ExpireReason reason = ExpireReason::kIdle;
};

// OpenFlow-style table: highest priority wins, oldest entry wins ties.
class FlowTable {
 public:
  // Replaces an existing entry with identical match and priority.
  // Returns the assigned seq.
  uint64_t install(FlowEntry entry, double now);

  // Highest-priority live match, or nullptr. Updates hit counters and
  // last_used. Entries past their deadline are skipped (not removed);
  // removal happens in expire().
  FlowEntry* match(const Packet& pkt, int in_port, double now);

  // Removes entries whose idle or hard deadline has passed.
  std::vector<ExpiredEntry> expire(double now);

  // Removes entries for which pred(entry) is true, without expiry records.
  template <typename Pred>
  size_t remove_if(Pred pred) {
    size_t before = entries_.size();
    std::erase_if(entries_, pred);
    return before - entries_.size();
  }

  const std::vector<FlowEntry>& entries() const { return entries_; }
  size_t size() const { return entries_.size(); }

  static bool expired(const FlowEntry& entry, double now);

 private:
  std::vector<FlowEntry> entries_;
  uint64_t next_seq_ = 1;
};

}  // namespace fasa::simnet
