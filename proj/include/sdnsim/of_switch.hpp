#pragma once

#include <cstdint>
#include <vector>

#include "sdnsim/core.hpp"

namespace sdnsim {

using NodeId = std::uint8_t;
inline constexpr NodeId kNoNode = 0xff;

enum class RuleAction : std::uint8_t { Forward, Drop };

struct FlowRule {
    FlowKey match;  // exact match
    RuleAction action = RuleAction::Forward;
    NodeId egress = kNoNode;  // destination host for Forward
    SimTime install_time = 0;
};

// Single exact-match table, open addressing, grow-by-doubling. Rules are
// replaced in place on duplicate keys and never individually removed, which
// keeps probe chains tombstone-free.
class FlowTable {
 public:
    explicit FlowTable(std::size_t capacity);

    // false iff the table is at capacity and the key is new
    bool install(const FlowRule& rule);
    const FlowRule* lookup(const FlowKey& key) const;

    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }

 private:
    struct Slot {
        FlowRule rule;
        bool used = false;
    };

    void grow();

    std::vector<Slot> slots_;
    std::size_t mask_ = 0;
    std::size_t size_ = 0;
    std::size_t capacity_;
};

enum class SwitchOutcome : std::uint8_t { Forwarded, PacketInSent, Dropped };

struct PipelineResult {
    SwitchOutcome outcome = SwitchOutcome::Dropped;
    NodeId egress = kNoNode;
};

// Vanilla data-plane pipeline: match an installed rule or hand the segment
// to the control plane (the caller turns PacketInSent into a packet-in).
class OfSwitch {
 public:
    explicit OfSwitch(std::size_t table_capacity) : table_(table_capacity) {}

    PipelineResult process_segment(const TcpSegment& seg, SimTime now);
    bool install_rule(const FlowRule& rule) { return table_.install(rule); }

    const FlowTable& table() const { return table_; }

 private:
    FlowTable table_;
};

}  // namespace sdnsim
