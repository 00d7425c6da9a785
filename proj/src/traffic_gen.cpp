#include "sdnsim/traffic_gen.hpp"

#include <cmath>

namespace sdnsim {

double bandwidth_to_conn_rate(double mbps) { return mbps * 780.0; }

double spoofed_syn_rate(double mbps) { return mbps * 1e6 / 8.0 / 64.0; }

double effective_rate(const WorkloadSpec& spec) {
    if (spec.rate_cps > 0) return spec.rate_cps;
    switch (spec.kind) {
        case WorkloadKind::SpoofedSynFlood:
            return spoofed_syn_rate(spec.rate_mbps);
        case WorkloadKind::BufferSaturation:
        case WorkloadKind::PortExhaustion:
            return bandwidth_to_conn_rate(spec.rate_mbps);
        case WorkloadKind::LegitClient:
            return 0;  // think-time driven
    }
    return 0;
}

SimTime Generator::paced_at(std::uint64_t n) const {
    const double rate = effective_rate(spec_);
    return spec_.start + static_cast<SimTime>(static_cast<double>(n) * 1e6 / rate);
}

void SpoofedSynFloodGen::on_timer(std::uint32_t id, SimTime, GenOutput& out) {
    if (id != 0) return;
    if (spec_.max_conns != 0 && n_ >= spec_.max_conns) return;

    TcpSegment syn;
    // fresh source drawn from a /8 so collisions stay negligible
    syn.src_ip = IpAddress{(spec_.src_base.value & 0xff000000u) |
                           static_cast<std::uint32_t>(rng_.below(1u << 24))};
    syn.src_port = static_cast<std::uint16_t>(1024 + rng_.below(64512));
    syn.dst_ip = spec_.dst_ip;
    syn.dst_port = spec_.dst_port;
    syn.flags = kSyn;
    syn.seq = rng_.next_u32();
    out.emit.push_back(syn);
    ++n_;

    const SimTime next = paced_at(n_);
    if (next < spec_.stop && (spec_.max_conns == 0 || n_ < spec_.max_conns)) {
        out.timers.emplace_back(next, 0);
    }
}

bool ConnFloodGen::accepts(const TcpSegment& seg) const {
    return seg.dst_ip.value >= spec_.src_base.value &&
           seg.dst_ip.value < spec_.src_base.value + spec_.src_pool;
}

void ConnFloodGen::on_timer(std::uint32_t id, SimTime, GenOutput& out) {
    if (id != 0) return;
    if (spec_.max_conns != 0 && n_ >= spec_.max_conns) return;
    const std::uint64_t addr_idx = n_ / kPortsPerAddr;
    if (addr_idx >= spec_.src_pool) return;  // real-address supply spent

    TcpSegment syn;
    syn.src_ip = IpAddress{spec_.src_base.value + static_cast<std::uint32_t>(addr_idx)};
    syn.src_port = static_cast<std::uint16_t>(1 + n_ % kPortsPerAddr);
    syn.dst_ip = spec_.dst_ip;
    syn.dst_port = spec_.dst_port;
    syn.flags = kSyn;
    syn.seq = rng_.next_u32();
    out.emit.push_back(syn);
    ++n_;

    const SimTime next = paced_at(n_);
    if (next < spec_.stop && (spec_.max_conns == 0 || n_ < spec_.max_conns) &&
        n_ / kPortsPerAddr < spec_.src_pool) {
        out.timers.emplace_back(next, 0);
    }
}

void ConnFloodGen::on_segment(const TcpSegment& seg, SimTime, GenOutput& out) {
    if (!seg.syn_ack()) return;  // connections are held open: ACK and go silent
    TcpSegment ack;
    ack.src_ip = seg.dst_ip;
    ack.src_port = seg.dst_port;
    ack.dst_ip = seg.src_ip;
    ack.dst_port = seg.src_port;
    ack.flags = kAck;
    ack.seq = seg.ack;
    ack.ack = seq_add(seg.seq, 1);
    out.emit.push_back(ack);
}

bool LegitClientGen::accepts(const TcpSegment& seg) const {
    return seg.dst_ip == spec_.src_base;
}

void LegitClientGen::start_txn(SimTime now, GenOutput& out) {
    if (now >= spec_.stop) return;
    if (spec_.max_conns != 0 && stats_.started >= spec_.max_conns) return;

    const std::uint32_t id = static_cast<std::uint32_t>(stats_.started);
    Txn txn;
    txn.flow = FlowKey{spec_.src_base, spec_.dst_ip,
                       static_cast<std::uint16_t>(10000 + id % 50000), spec_.dst_port};
    txn.isn = rng_.next_u32();
    txn.syn_at = now;
    by_flow_[txn.flow] = id;

    TcpSegment syn;
    syn.src_ip = txn.flow.src_ip;
    syn.src_port = txn.flow.src_port;
    syn.dst_ip = txn.flow.dst_ip;
    syn.dst_port = txn.flow.dst_port;
    syn.flags = kSyn;
    syn.seq = txn.isn;
    out.emit.push_back(syn);
    out.timers.emplace_back(now + spec_.client_timeout, 1 + id);

    live_.emplace(id, txn);
    ++stats_.started;
}

void LegitClientGen::finish_txn(std::uint32_t id, SimTime now, GenOutput& out) {
    by_flow_.erase(live_.at(id).flow);
    live_.erase(id);
    out.timers.emplace_back(now + spec_.think_time, 0);  // next fetch
}

void LegitClientGen::on_timer(std::uint32_t id, SimTime now, GenOutput& out) {
    if (id == 0) {
        start_txn(now, out);
        return;
    }
    auto it = live_.find(id - 1);
    if (it == live_.end()) return;  // transaction already finished
    // no response inside the timeout: failed unless the page already landed
    if (it->second.state != TxnState::AwaitFinAck) ++stats_.failed;
    finish_txn(id - 1, now, out);
}

void LegitClientGen::on_segment(const TcpSegment& seg, SimTime now, GenOutput& out) {
    auto fit = by_flow_.find(reversed(flow_key_of(seg)));
    if (fit == by_flow_.end()) return;
    const std::uint32_t id = fit->second;
    Txn& txn = live_.at(id);

    if (seg.has(kRst)) {
        ++stats_.failed;
        finish_txn(id, now, out);
        return;
    }

    TcpSegment reply;
    reply.src_ip = txn.flow.src_ip;
    reply.src_port = txn.flow.src_port;
    reply.dst_ip = txn.flow.dst_ip;
    reply.dst_port = txn.flow.dst_port;

    switch (txn.state) {
        case TxnState::AwaitSynAck: {
            if (!seg.syn_ack() || seg.ack != seq_add(txn.isn, 1)) return;
            reply.flags = kAck;
            reply.seq = seg.ack;
            reply.ack = seq_add(seg.seq, 1);
            out.emit.push_back(reply);
            TcpSegment request = reply;
            request.payload_len = spec_.page_bytes;
            out.emit.push_back(request);
            txn.state = TxnState::AwaitResponse;
            return;
        }
        case TxnState::AwaitResponse: {
            if (seg.payload_len == 0) return;
            stats_.latencies.push_back(to_seconds(now - txn.syn_at));
            ++stats_.completed;
            reply.flags = kFin | kAck;
            reply.seq = seg.ack;
            reply.ack = seq_add(seg.seq, seg.payload_len);
            out.emit.push_back(reply);
            txn.state = TxnState::AwaitFinAck;
            return;
        }
        case TxnState::AwaitFinAck: {
            if (!seg.has(kFin)) return;
            reply.flags = kAck;
            reply.seq = seg.ack;
            reply.ack = seq_add(seg.seq, seg.payload_len + 1);
            out.emit.push_back(reply);
            finish_txn(id, now, out);
            return;
        }
    }
}

void LegitClientGen::collect(ClientStats& stats) const {
    stats.started += stats_.started;
    stats.completed += stats_.completed;
    stats.failed += stats_.failed;
    stats.latencies.insert(stats.latencies.end(), stats_.latencies.begin(),
                           stats_.latencies.end());
}

std::unique_ptr<Generator> make_generator(const WorkloadSpec& spec, Rng rng) {
    switch (spec.kind) {
        case WorkloadKind::SpoofedSynFlood:
            return std::make_unique<SpoofedSynFloodGen>(spec, rng);
        case WorkloadKind::BufferSaturation:
        case WorkloadKind::PortExhaustion:
            return std::make_unique<ConnFloodGen>(spec, rng);
        case WorkloadKind::LegitClient:
            return std::make_unique<LegitClientGen>(spec, rng);
    }
    return nullptr;
}

std::vector<std::pair<SimTime, TcpSegment>> next_events(const WorkloadSpec& spec, SimTime from,
                                                        SimTime until, std::uint64_t seed) {
    std::vector<std::pair<SimTime, TcpSegment>> events;
    auto gen = make_generator(spec, Rng(seed, 0));
    SimTime at = spec.start;
    std::uint32_t timer = 0;
    while (at < until) {
        GenOutput out;
        gen->on_timer(timer, at, out);
        for (const TcpSegment& seg : out.emit) {
            if (at >= from) events.emplace_back(at, seg);
        }
        if (out.timers.empty()) break;
        at = out.timers.front().first;
        timer = out.timers.front().second;
    }
    return events;
}

}  // namespace sdnsim
