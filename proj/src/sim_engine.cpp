#include "sdnsim/sim_engine.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

#include "sdnsim/rng.hpp"
#include "sdnsim/syn_cookie.hpp"

namespace sdnsim {

namespace {

constexpr IpAddress kServerIp = IpAddress::of(10, 0, 0, 1);
constexpr IpAddress kClientIp = IpAddress::of(10, 0, 0, 10);
constexpr IpAddress kAttackerBase = IpAddress::of(10, 2, 0, 0);
constexpr IpAddress kSwitchAddrBase = IpAddress::of(10, 9, 0, 1);
constexpr IpAddress kSpoofedBase = IpAddress::of(172, 0, 0, 0);

}  // namespace

Simulation::Simulation(const SimConfig& cfg)
    : cfg_(cfg),
      switch_(cfg.flow_table_capacity),
      ctrl_(cfg.controller, [this](IpAddress ip) { return route(ip); }),
      server_ip_(kServerIp),
      client_ip_(kClientIp) {
    for (std::uint32_t i = 0; i < std::max<std::uint32_t>(cfg.switch_address_count, 1); ++i) {
        switch_addrs_.push_back(IpAddress{kSwitchAddrBase.value + i});
    }

    server_isn_secret_ = Rng(cfg.seed, 4).next_u64();

    if (cfg.policy != Policy::Vanilla) {
        Rng secret(cfg.seed, 3);
        CookieKey ck;
        ck.secret_hi = secret.next_u64();
        ck.secret_lo = secret.next_u64();
        MigrationConfig mig = cfg.migration;
        if (mig.switch_addresses.empty()) mig.switch_addresses = switch_addrs_;
        migration_ = std::make_unique<ConnMigration>(mig, ck);
    }

    switch (cfg.policy) {
        case Policy::Vanilla:
            policy_ = std::make_unique<VanillaPolicy>();
            break;
        case Policy::AvantGuard:
            policy_ = std::make_unique<ProxyAllPolicy>();
            break;
        case Policy::LineSwitch: {
            LineSwitchConfig ls = cfg.lineswitch;
            ls.rng_seed = Rng(cfg.seed, 2).next_u64();
            policy_ = std::make_unique<LineSwitchPolicy>(ls);
            break;
        }
    }

    host_one_way_ = seconds(cfg.host_link.rtt_ms / 2000.0);
    ctrl_one_way_ = seconds(cfg.ctrl_link.rtt_ms / 2000.0);

    std::uint32_t gen_idx = 0;
    std::uint32_t flood_slots = 0;
    for (const WorkloadSpec& w : cfg.workloads) {
        WorkloadSpec spec = w;
        NodeId node;
        if (spec.kind == WorkloadKind::LegitClient) {
            node = kClientNode;
            if (spec.src_base.value == 0) spec.src_base = client_ip_;
        } else if (spec.kind == WorkloadKind::SpoofedSynFlood) {
            node = kAttackerNode;
            if (spec.src_base.value == 0) spec.src_base = kSpoofedBase;
        } else {
            node = kAttackerNode;
            if (spec.src_base.value == 0) {
                spec.src_base = IpAddress{kAttackerBase.value + flood_slots * 0x10000u};
                ++flood_slots;
            }
            if (attacker_lo_ == 0 || spec.src_base.value < attacker_lo_) {
                attacker_lo_ = spec.src_base.value;
            }
            attacker_hi_ = std::max(attacker_hi_, spec.src_base.value + spec.src_pool);
        }
        if (spec.dst_ip.value == 0) {
            spec.dst_ip = server_ip_;
            spec.dst_port = server_port_;
        }
        generators_.push_back(make_generator(spec, Rng(cfg.seed, 100 + gen_idx)));
        gen_node_.push_back(node);

        Event e;
        e.at = spec.start;
        e.kind = EventKind::GeneratorWakeup;
        e.gen = gen_idx;
        e.gen_timer = 0;
        schedule(e);
        ++gen_idx;
    }

    if (!cfg.trace_path.empty()) {
        trace_ = std::fopen(cfg.trace_path.c_str(), "w");
        if (trace_ == nullptr) throw std::runtime_error("cannot open trace file " + cfg.trace_path);
    }
}

Simulation::~Simulation() {
    if (trace_ != nullptr) std::fclose(trace_);
}

NodeId Simulation::route(IpAddress ip) const {
    if (ip == server_ip_) return kServerNode;
    if (ip == client_ip_) return kClientNode;
    if (ip.value >= attacker_lo_ && ip.value < attacker_hi_) return kAttackerNode;
    for (IpAddress a : switch_addrs_) {
        if (a == ip) return kSwitchNode;
    }
    return kNoNode;
}

bool Simulation::owns_ip(NodeId node, IpAddress ip) const {
    switch (node) {
        case kServerNode:
            return ip == server_ip_;
        case kClientNode:
            return ip == client_ip_;
        case kAttackerNode:
            return route(ip) == kAttackerNode;
        default:
            return false;
    }
}

SimTime Simulation::tx_time(const LinkConfig& link, const TcpSegment& seg) const {
    if (link.bandwidth_mbps <= 0) return 0;
    return static_cast<SimTime>(
        std::llround(static_cast<double>(seg.wire_bytes()) * 8.0 / link.bandwidth_mbps));
}

void Simulation::schedule(Event e) {
    if (e.at < clock_) throw std::logic_error("event scheduled in the past");
    e.seqno = next_seqno_++;
    if (!(e.kind == EventKind::TimerExpiry && e.timer == TimerKind::GcSweep)) ++non_gc_pending_;
    queue_.push(e);
}

void Simulation::trace_arrival(const Event& e) const {
    if (trace_ == nullptr) return;
    std::fprintf(trace_, "%llu n%u %s:%u > %s:%u %s seq=%u ack=%u len=%u\n",
                 static_cast<unsigned long long>(e.at), unsigned(e.node),
                 e.seg.src_ip.str().c_str(), unsigned(e.seg.src_port), e.seg.dst_ip.str().c_str(),
                 unsigned(e.seg.dst_port), flags_str(e.seg.flags).c_str(), e.seg.seq, e.seg.ack,
                 e.seg.payload_len);
}

void Simulation::deliver_host_to_switch(NodeId host, const TcpSegment& seg, SimTime now) {
    LinkState& l = links_[host];
    const SimTime depart = std::max(now, l.to_switch_busy) + tx_time(cfg_.host_link, seg);
    l.to_switch_busy = depart;
    Event e;
    e.at = depart + host_one_way_;
    e.kind = EventKind::SegmentArrival;
    e.seg = seg;
    e.node = kSwitchNode;
    e.ingress = host;
    schedule(e);
}

void Simulation::deliver_switch_to_node(NodeId node, const TcpSegment& seg, SimTime earliest) {
    LinkState& l = links_[node];
    const SimTime depart = std::max(earliest, l.from_switch_busy) + tx_time(cfg_.host_link, seg);
    l.from_switch_busy = depart;
    Event e;
    e.at = depart + host_one_way_;
    e.kind = EventKind::SegmentArrival;
    e.seg = seg;
    e.node = node;
    e.ingress = kSwitchNode;
    schedule(e);
}

void Simulation::emit_from_switch(const TcpSegment& seg, SimTime earliest) {
    const NodeId n = route(seg.dst_ip);
    if (n == kNoNode || n == kSwitchNode) {
        ++metrics_.unroutable_drops;
        return;
    }
    deliver_switch_to_node(n, seg, earliest);
}

void Simulation::send_packet_in(PacketIn pin, SimTime now) {
    if (ctrl_one_way_ == 0) {
        enqueue_packet_in(pin, now);
        return;
    }
    Event e;
    e.at = now + ctrl_one_way_;
    e.kind = EventKind::PacketInArrival;
    e.seg = pin.trigger;
    e.node = kControllerNode;
    e.ingress = pin.ingress;
    e.pin_type = static_cast<std::uint8_t>(pin.type);
    e.pin_ok = pin.handshake_ok;
    schedule(e);
}

void Simulation::enqueue_packet_in(const PacketIn& pin, SimTime now) {
    ++metrics_.packet_ins;
    const bool accepted = ctrl_.enqueue_packet_in(pin, now);
    if (!accepted) {
        if (pin.type == PacketInType::MigrationReport && migration_) {
            // an unreachable control plane refuses the migration
            apply_actions(migration_->on_controller_verdict(flow_key_of(pin.trigger), false, now),
                          pin.ingress, now);
        }
        return;
    }
    if (ctrl_.begin_service_if_idle()) {
        Event e;
        e.at = now + ctrl_.service_time();
        e.kind = EventKind::ControllerService;
        schedule(e);
    }
}

void Simulation::apply_service_output(ServiceOutput&& out, SimTime now) {
    for (const FlowRule& rule : out.installs) {
        if (switch_.install_rule(rule)) {
            ++metrics_.rules_installed;
        } else {
            ++metrics_.rules_rejected;
        }
    }
    if (out.packet_out) emit_from_switch(*out.packet_out, now);
    if (out.verdict && migration_) {
        apply_actions(migration_->on_controller_verdict(out.verdict->flow, out.verdict->allow, now),
                      kNoNode, now);
    }
}

void Simulation::apply_actions(ProxyActions&& a, NodeId ingress, SimTime now) {
    if (a.completed) {
        policy_->on_handshake_complete(a.completed->second, now);
        pending_hs_.erase(a.completed->first);
        arm_gc(now);
    }
    if (a.admitted_src) policy_->note_conn_opened(*a.admitted_src);
    if (a.closed_src) policy_->note_conn_closed(*a.closed_src);
    for (const TcpSegment& seg : a.to_client) emit_from_switch(seg, now + cfg_.proxy_op_delay);
    for (const TcpSegment& seg : a.to_server) emit_from_switch(seg, now + cfg_.proxy_op_delay);
    for (PacketIn& pin : a.packet_ins) {
        pin.ingress = ingress;
        send_packet_in(pin, now);
    }
}

void Simulation::switch_rx(const TcpSegment& seg, NodeId ingress, SimTime now) {
    if (migration_ != nullptr) {
        if (route(seg.dst_ip) == kSwitchNode) {
            apply_actions(migration_->on_server_segment(seg, now), ingress, now);
            return;
        }
        if (migration_->has_conn(flow_key_of(seg))) {
            apply_actions(migration_->on_client_segment(seg, now), ingress, now);
            return;
        }
        if (seg.pure_syn()) {
            switch (policy_->classify_syn(seg.src_ip, now)) {
                case SynDecision::Proxy: {
                    ++metrics_.syn_proxied;
                    const SimTime timeout = policy_->handshake_timeout();
                    if (timeout > 0) {
                        pending_hs_[flow_key_of(seg)] = seg.src_ip;
                        Event e;
                        e.at = now + timeout;
                        e.kind = EventKind::TimerExpiry;
                        e.timer = TimerKind::HandshakeTimeout;
                        e.flow = flow_key_of(seg);
                        schedule(e);
                    }
                    apply_actions(migration_->on_client_segment(seg, now), ingress, now);
                    return;
                }
                case SynDecision::Forward:
                    ++metrics_.syn_forwarded;
                    break;  // into the plain pipeline
                case SynDecision::Drop:
                    ++metrics_.syn_blacklist_dropped;
                    return;
            }
        }
    }

    const PipelineResult r = switch_.process_segment(seg, now);
    switch (r.outcome) {
        case SwitchOutcome::Forwarded:
            ++metrics_.switch_forwarded;
            deliver_switch_to_node(r.egress, seg, now);
            return;
        case SwitchOutcome::Dropped:
            ++metrics_.switch_dropped;
            return;
        case SwitchOutcome::PacketInSent: {
            if (migration_ != nullptr && seg.has(kAck) && !seg.has(kSyn) && !seg.has(kRst)) {
                // possible completion of a cookie handshake
                apply_actions(migration_->on_client_segment(seg, now), ingress, now);
                return;
            }
            PacketIn pin;
            pin.type = PacketInType::TableMiss;
            pin.trigger = seg;
            pin.ingress = ingress;
            send_packet_in(pin, now);
            return;
        }
    }
}

void Simulation::server_reflect(const TcpSegment& seg, std::vector<TcpSegment>& out) const {
    if (seg.dst_port != server_port_) return;

    TcpSegment reply;
    reply.src_ip = seg.dst_ip;
    reply.src_port = seg.dst_port;
    reply.dst_ip = seg.src_ip;
    reply.dst_port = seg.src_port;

    if (seg.pure_syn()) {
        reply.flags = kSyn | kAck;
        reply.seq = static_cast<std::uint32_t>(
            mix64(server_isn_secret_ ^ FlowKeyHash{}(flow_key_of(seg))));
        reply.ack = seq_add(seg.seq, 1);
        out.push_back(reply);
        return;
    }
    if (seg.has(kRst)) return;
    if (seg.has(kFin)) {
        reply.flags = kFin | kAck;
        reply.seq = seg.ack;  // the peer's ACK tells us where our sequence stands
        reply.ack = seq_add(seg.seq, seg.payload_len + 1);
        out.push_back(reply);
        return;
    }
    if (seg.payload_len > 0) {
        reply.flags = kAck;
        reply.seq = seg.ack;
        reply.ack = seq_add(seg.seq, seg.payload_len);
        reply.payload_len = seg.payload_len;  // page-sized response
        out.push_back(reply);
        return;
    }
    // pure ACK: nothing to do
}

void Simulation::host_rx(NodeId node, const TcpSegment& seg, SimTime now) {
    if (!owns_ip(node, seg.dst_ip)) {
        ++metrics_.host_drops;
        return;
    }
    if (node == kServerNode) {
        std::vector<TcpSegment> replies;
        server_reflect(seg, replies);
        for (const TcpSegment& r : replies) deliver_host_to_switch(node, r, now);
        return;
    }
    for (std::uint32_t i = 0; i < generators_.size(); ++i) {
        if (gen_node_[i] != node || !generators_[i]->accepts(seg)) continue;
        GenOutput out;
        generators_[i]->on_segment(seg, now, out);
        flush_gen_output(i, out, now);
    }
}

void Simulation::flush_gen_output(std::uint32_t idx, GenOutput& out, SimTime now) {
    for (const TcpSegment& seg : out.emit) deliver_host_to_switch(gen_node_[idx], seg, now);
    for (const auto& [at, timer_id] : out.timers) {
        Event e;
        e.at = at;
        e.kind = EventKind::GeneratorWakeup;
        e.gen = idx;
        e.gen_timer = timer_id;
        schedule(e);
    }
}

void Simulation::run_generator(std::uint32_t idx, std::uint32_t timer_id, SimTime now) {
    GenOutput out;
    generators_[idx]->on_timer(timer_id, now, out);
    flush_gen_output(idx, out, now);
}

void Simulation::arm_gc(SimTime now) {
    if (gc_armed_ || !policy_->wants_gc()) return;
    gc_armed_ = true;
    Event e;
    e.at = now + cfg_.gc_interval;
    e.kind = EventKind::TimerExpiry;
    e.timer = TimerKind::GcSweep;
    schedule(e);
}

void Simulation::dispatch(const Event& e) {
    switch (e.kind) {
        case EventKind::SegmentArrival:
            trace_arrival(e);
            if (e.node == kSwitchNode) {
                switch_rx(e.seg, e.ingress, e.at);
            } else {
                host_rx(e.node, e.seg, e.at);
            }
            return;
        case EventKind::PacketInArrival: {
            PacketIn pin;
            pin.type = static_cast<PacketInType>(e.pin_type);
            pin.trigger = e.seg;
            pin.ingress = e.ingress;
            pin.handshake_ok = e.pin_ok;
            enqueue_packet_in(pin, e.at);
            return;
        }
        case EventKind::CtrlDeliver: {
            assert(!ctrl_outbox_.empty());
            ServiceOutput out = std::move(ctrl_outbox_.front());
            ctrl_outbox_.pop_front();
            apply_service_output(std::move(out), e.at);
            return;
        }
        case EventKind::ControllerService: {
            ServiceOutput out = ctrl_.service_step(e.at);
            if (ctrl_.busy()) {
                Event next;
                next.at = e.at + ctrl_.service_time();
                next.kind = EventKind::ControllerService;
                schedule(next);
            }
            if (ctrl_one_way_ == 0) {
                apply_service_output(std::move(out), e.at);
            } else {
                ctrl_outbox_.push_back(std::move(out));
                Event d;
                d.at = e.at + ctrl_one_way_;
                d.kind = EventKind::CtrlDeliver;
                schedule(d);
            }
            return;
        }
        case EventKind::TimerExpiry:
            if (e.timer == TimerKind::HandshakeTimeout) {
                auto it = pending_hs_.find(e.flow);
                if (it == pending_hs_.end()) return;  // handshake completed in time
                const IpAddress src = it->second;
                pending_hs_.erase(it);
                ++metrics_.handshake_failures;
                policy_->on_handshake_failed(src, e.at);
                arm_gc(e.at);
            } else if (e.timer == TimerKind::GcSweep) {
                policy_->gc_expired(e.at);
                if (policy_->record_count() > 0 || !pending_hs_.empty()) {
                    Event next;
                    next.at = e.at + cfg_.gc_interval;
                    next.kind = EventKind::TimerExpiry;
                    next.timer = TimerKind::GcSweep;
                    schedule(next);
                } else {
                    gc_armed_ = false;
                }
            }
            return;
        case EventKind::GeneratorWakeup:
            run_generator(e.gen, e.gen_timer, e.at);
            return;
    }
}

bool Simulation::stop_predicate_hit(StopPredicate pred) const {
    switch (pred) {
        case StopPredicate::None:
            return false;
        case StopPredicate::BufferSaturated:
            return migration_ && migration_->metrics().first_buffer_refusal.has_value();
        case StopPredicate::ControllerSaturated:
            return ctrl_.first_saturation_time().has_value();
        case StopPredicate::PortsExhausted:
            return migration_ && migration_->metrics().first_ports_exhausted.has_value();
    }
    return false;
}

SimulationReport Simulation::run_until(const StopSpec& stop) {
    while (!queue_.empty() && non_gc_pending_ > 0) {
        const Event e = queue_.top();
        if (e.at > stop.at) {
            clock_ = stop.at;
            break;
        }
        queue_.pop();
        if (!(e.kind == EventKind::TimerExpiry && e.timer == TimerKind::GcSweep)) {
            --non_gc_pending_;
        }
        assert(e.at >= clock_);
        clock_ = e.at;
        dispatch(e);
        if (stop.predicate != StopPredicate::None && stop_predicate_hit(stop.predicate)) break;
    }
    return build_report();
}

SimulationReport Simulation::build_report() {
    SimulationReport r;
    r.packet_ins = metrics_.packet_ins;
    r.controller_drops = ctrl_.dropped();

    std::optional<SimTime> sat;
    if (migration_ && migration_->metrics().first_buffer_refusal) {
        sat = migration_->metrics().first_buffer_refusal;
    }
    if (ctrl_.first_saturation_time() &&
        (!sat || *ctrl_.first_saturation_time() < *sat)) {
        sat = ctrl_.first_saturation_time();
    }
    if (sat) r.saturation_time = to_seconds(*sat);

    if (migration_) {
        r.peak_translation_entries = migration_->buffer().peak();
        r.admitted_conns = migration_->metrics().admitted;
        r.buffer_refusals = migration_->metrics().buffer_refusals;
        r.ports_exhausted = migration_->metrics().ports_exhausted;
        r.live_migration_conns = migration_->live_conns();
    }
    r.blacklist_events = policy_->blacklist_events();
    r.source_records = policy_->record_count();
    r.syn_proxied = metrics_.syn_proxied;
    r.syn_forwarded = metrics_.syn_forwarded;
    r.syn_blacklist_dropped = metrics_.syn_blacklist_dropped;
    r.handshake_failures = metrics_.handshake_failures;

    ClientStats stats;
    for (const auto& g : generators_) g->collect(stats);
    r.pages_started = stats.started;
    r.pages_completed = stats.completed;
    r.pages_failed = stats.failed;
    r.page_latencies = std::move(stats.latencies);
    if (stats.completed + stats.failed > 0) {
        r.retrieval_success_rate = static_cast<double>(stats.completed) /
                                   static_cast<double>(stats.completed + stats.failed);
    }
    r.end_time = to_seconds(clock_);
    return r;
}

}  // namespace sdnsim
