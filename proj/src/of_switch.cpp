#include "sdnsim/of_switch.hpp"

namespace sdnsim {
namespace {

std::size_t pow2_at_least(std::size_t n) {
    std::size_t p = 64;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace

FlowTable::FlowTable(std::size_t capacity) : capacity_(capacity) {
    slots_.resize(pow2_at_least(16));
    mask_ = slots_.size() - 1;
}

void FlowTable::grow() {
    std::vector<Slot> old = std::move(slots_);
    slots_.clear();
    slots_.resize(old.size() * 2);
    mask_ = slots_.size() - 1;
    for (const Slot& s : old) {
        if (!s.used) continue;
        std::size_t i = FlowKeyHash{}(s.rule.match) & mask_;
        while (slots_[i].used) i = (i + 1) & mask_;
        slots_[i] = s;
    }
}

bool FlowTable::install(const FlowRule& rule) {
    std::size_t i = FlowKeyHash{}(rule.match) & mask_;
    while (slots_[i].used) {
        if (slots_[i].rule.match == rule.match) {
            slots_[i].rule = rule;  // duplicate key replaces the prior rule
            return true;
        }
        i = (i + 1) & mask_;
    }
    if (size_ >= capacity_) return false;
    if ((size_ + 1) * 4 > slots_.size() * 3) {
        grow();
        i = FlowKeyHash{}(rule.match) & mask_;
        while (slots_[i].used) i = (i + 1) & mask_;
    }
    slots_[i].rule = rule;
    slots_[i].used = true;
    ++size_;
    return true;
}

const FlowRule* FlowTable::lookup(const FlowKey& key) const {
    std::size_t i = FlowKeyHash{}(key) & mask_;
    while (slots_[i].used) {
        if (slots_[i].rule.match == key) return &slots_[i].rule;
        i = (i + 1) & mask_;
    }
    return nullptr;
}

PipelineResult OfSwitch::process_segment(const TcpSegment& seg, SimTime) {
    const FlowRule* rule = table_.lookup(flow_key_of(seg));
    if (rule == nullptr) return {SwitchOutcome::PacketInSent, kNoNode};
    if (rule->action == RuleAction::Drop) return {SwitchOutcome::Dropped, kNoNode};
    return {SwitchOutcome::Forwarded, rule->egress};
}

}  // namespace sdnsim
