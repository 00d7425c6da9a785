#include "sdnsim/controller.hpp"

#include <cmath>
#include <utility>

namespace sdnsim {

Controller::Controller(const ControllerConfig& cfg, std::function<NodeId(IpAddress)> locate)
    : cfg_(cfg), locate_(std::move(locate)) {
    svc_us_ = static_cast<SimTime>(std::llround(1e6 / cfg_.service_rate));
}

bool Controller::enqueue_packet_in(const PacketIn& pin, SimTime now) {
    ++enqueued_;
    if (queue_.size() >= cfg_.queue_capacity) {
        ++dropped_;
        if (!first_drop_) first_drop_ = now;
        if (!first_saturated_) first_saturated_ = now;
        return false;
    }
    PacketIn q = pin;
    q.enqueued_at = now;
    queue_.push_back(q);
    return true;
}

bool Controller::begin_service_if_idle() {
    if (busy_ || queue_.empty()) return false;
    busy_ = true;
    return true;
}

ServiceOutput Controller::service_step(SimTime now) {
    ServiceOutput out;
    if (queue_.empty()) {
        busy_ = false;
        return out;
    }
    PacketIn pin = queue_.front();
    queue_.pop_front();
    ++processed_;
    busy_ = !queue_.empty();
    if (cfg_.saturation_latency_s > 0 && !first_saturated_ &&
        now - pin.enqueued_at >= seconds(cfg_.saturation_latency_s)) {
        first_saturated_ = now;
    }

    switch (pin.type) {
        case PacketInType::TableMiss: {
            const FlowKey fwd_key = flow_key_of(pin.trigger);
            const NodeId fwd_egress = locate_ ? locate_(pin.trigger.dst_ip) : kNoNode;
            if (fwd_egress != kNoNode) {
                out.installs.push_back({fwd_key, RuleAction::Forward, fwd_egress, now});
                out.packet_out = pin.trigger;
            }
            out.installs.push_back({reversed(fwd_key), RuleAction::Forward, pin.ingress, now});
            break;
        }
        case PacketInType::MigrationReport:
            // learning controller admits every completed handshake
            out.verdict = Verdict{flow_key_of(pin.trigger), true};
            break;
        case PacketInType::HandshakeResult:
            break;  // informational
    }
    return out;
}

}  // namespace sdnsim
