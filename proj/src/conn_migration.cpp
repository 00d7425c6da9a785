#include "sdnsim/conn_migration.hpp"

#include <cassert>

namespace sdnsim {
namespace {

TcpSegment rst_to_client(const FlowKey& client_flow) {
    // refusal RSTs keep the transparent-proxy illusion: source is the server
    TcpSegment s;
    s.src_ip = client_flow.dst_ip;
    s.src_port = client_flow.dst_port;
    s.dst_ip = client_flow.src_ip;
    s.dst_port = client_flow.src_port;
    s.flags = kRst | kAck;
    return s;
}

}  // namespace

std::optional<std::pair<IpAddress, std::uint16_t>> PortAllocator::allocate(
    IpAddress dest_ip, std::uint16_t dest_port) {
    DestState& d = dests_[dest_key(dest_ip, dest_port)];
    std::uint32_t idx;
    if (!d.freed.empty()) {
        idx = d.freed.back();
        d.freed.pop_back();
    } else if (d.cursor < addrs_.size() * kUsablePorts) {
        idx = d.cursor++;
    } else {
        return std::nullopt;
    }
    ++d.live;
    return std::make_pair(addrs_[idx / kUsablePorts],
                          static_cast<std::uint16_t>(kFirstPort + idx % kUsablePorts));
}

void PortAllocator::release(IpAddress dest_ip, std::uint16_t dest_port, IpAddress switch_ip,
                            std::uint16_t port) {
    auto it = dests_.find(dest_key(dest_ip, dest_port));
    if (it == dests_.end()) return;
    std::uint32_t addr_idx = 0;
    while (addr_idx < addrs_.size() && !(addrs_[addr_idx] == switch_ip)) ++addr_idx;
    if (addr_idx == addrs_.size() || port < kFirstPort) return;
    it->second.freed.push_back(addr_idx * kUsablePorts + (port - kFirstPort));
    if (it->second.live > 0) --it->second.live;
}

std::uint64_t PortAllocator::allocated(IpAddress dest_ip, std::uint16_t dest_port) const {
    auto it = dests_.find(dest_key(dest_ip, dest_port));
    return it == dests_.end() ? 0 : it->second.live;
}

ConnMigration::ConnMigration(const MigrationConfig& cfg, const CookieKey& cookie_key)
    : cfg_(cfg),
      cookie_key_(cookie_key),
      buffer_(cfg.buffer_bytes, cfg.entry_bytes),
      ports_(cfg.switch_addresses) {}

void ConnMigration::set_phase(MigrationConn& c, MigrationPhase next) {
    // legal moves: Report -> Migration -> Relay, anything -> Closed
    assert(next == MigrationPhase::Closed ||
           (c.phase == MigrationPhase::Report && next == MigrationPhase::Migration) ||
           (c.phase == MigrationPhase::Migration && next == MigrationPhase::Relay));
    c.phase = next;
}

void ConnMigration::teardown(ConnMap::iterator it, ProxyActions& out) {
    MigrationConn& c = it->second;
    if (c.port_allocated) {
        ports_.release(c.entry.dest_ip, c.entry.dest_port, c.entry.switch_ip, c.entry.port_r);
        server_to_client_.erase(
            FlowKey{c.entry.dest_ip, c.entry.switch_ip, c.entry.dest_port, c.entry.port_r});
    }
    buffer_.release();
    set_phase(c, MigrationPhase::Closed);
    out.closed_src = c.entry.ip_src;
    ++metrics_.teardowns;
    conns_.erase(it);
}

std::optional<MigrationPhase> ConnMigration::phase_of(const FlowKey& client_flow) const {
    auto it = conns_.find(client_flow);
    if (it == conns_.end()) return std::nullopt;
    return it->second.phase;
}

ProxyActions ConnMigration::on_client_segment(const TcpSegment& seg, SimTime now) {
    ProxyActions out;
    const FlowKey flow = flow_key_of(seg);
    auto it = conns_.find(flow);

    if (it == conns_.end()) {
        if (seg.pure_syn()) {
            // Classification: stateless cookie handshake, sender spoofed as
            // the destination host. Nothing stored.
            TcpSegment synack;
            synack.src_ip = seg.dst_ip;
            synack.src_port = seg.dst_port;
            synack.dst_ip = seg.src_ip;
            synack.dst_port = seg.src_port;
            synack.flags = kSyn | kAck;
            synack.seq = issue_cookie(cookie_key_, flow, now);
            synack.ack = seq_add(seg.seq, 1);
            out.to_client.push_back(synack);
            ++metrics_.syn_acks_sent;
            return out;
        }
        if (seg.has(kAck) && !seg.has(kSyn) && !seg.has(kRst)) {
            const std::uint32_t echoed = seq_sub(seg.ack, 1);
            if (!validate_cookie(cookie_key_, flow, echoed, now)) {
                ++metrics_.cookie_rejects;
                return out;  // silently dropped
            }
            ++metrics_.cookie_accepts;
            out.completed = std::make_pair(flow, seg.src_ip);
            if (!buffer_.try_reserve()) {
                ++metrics_.buffer_refusals;
                if (!metrics_.first_buffer_refusal) metrics_.first_buffer_refusal = now;
                out.refused_buffer_full = true;
                out.to_client.push_back(rst_to_client(flow));
                return out;
            }
            MigrationConn c;
            c.phase = MigrationPhase::Report;
            c.client_flow = flow;
            c.cookie_isn = echoed;
            c.client_isn = seq_sub(seg.seq, 1);
            c.entry.ip_src = flow.src_ip;
            c.entry.port_src = flow.src_port;
            c.entry.dest_ip = flow.dst_ip;
            c.entry.dest_port = flow.dst_port;
            c.created = now;
            c.awaiting_first_data = cfg_.delayed && seg.payload_len == 0;
            if (seg.payload_len > 0 || seg.has(kFin)) c.pending.push_back(seg);
            if (!c.awaiting_first_data) {
                PacketIn pin;
                pin.type = PacketInType::MigrationReport;
                pin.trigger = seg;
                out.packet_ins.push_back(pin);
            }
            ++metrics_.admitted;
            out.admitted_src = seg.src_ip;
            conns_.emplace(flow, std::move(c));
            return out;
        }
        ++metrics_.dropped_client;  // RST or stray segment for an unknown flow
        return out;
    }

    MigrationConn& c = it->second;
    switch (c.phase) {
        case MigrationPhase::Report:
        case MigrationPhase::Migration: {
            if (seg.has(kRst)) {
                teardown(it, out);
                return out;
            }
            if (c.awaiting_first_data && seg.payload_len > 0) {
                c.awaiting_first_data = false;
                PacketIn pin;
                pin.type = PacketInType::MigrationReport;
                pin.trigger = seg;
                out.packet_ins.push_back(pin);
            }
            if (seg.payload_len > 0 || seg.has(kFin)) {
                // hold data until the relay opens
                if (c.pending.size() < cfg_.pending_limit) {
                    c.pending.push_back(seg);
                } else {
                    ++metrics_.dropped_client;
                }
            }
            return out;
        }
        case MigrationPhase::Relay: {
            TcpSegment t = translate(seg, c.entry, TranslateDir::ClientToServer);
            out.to_server.push_back(t);
            ++metrics_.relayed_client;
            if (seg.has(kRst)) {
                teardown(it, out);
                return out;
            }
            if (seg.has(kFin)) c.fin_client = true;
            if (c.fin_client && c.fin_server) teardown(it, out);
            return out;
        }
        default:
            ++metrics_.dropped_client;
            return out;
    }
}

ProxyActions ConnMigration::on_controller_verdict(const FlowKey& flow, bool allow, SimTime now) {
    ProxyActions out;
    auto it = conns_.find(flow);
    if (it == conns_.end() || it->second.phase != MigrationPhase::Report) return out;
    MigrationConn& c = it->second;

    if (!allow) {
        out.to_client.push_back(rst_to_client(flow));
        teardown(it, out);
        return out;
    }

    auto slot = ports_.allocate(flow.dst_ip, flow.dst_port);
    if (!slot) {
        ++metrics_.ports_exhausted;
        if (!metrics_.first_ports_exhausted) metrics_.first_ports_exhausted = now;
        out.refused_ports = true;
        out.to_client.push_back(rst_to_client(flow));
        teardown(it, out);
        return out;
    }

    c.entry.switch_ip = slot->first;
    c.entry.port_r = slot->second;
    c.port_allocated = true;
    set_phase(c, MigrationPhase::Migration);
    server_to_client_[FlowKey{c.entry.dest_ip, c.entry.switch_ip, c.entry.dest_port,
                              c.entry.port_r}] = flow;

    // Handshake toward the server reuses the client's ISN, which is what
    // lets relayed client sequence numbers pass through untranslated.
    TcpSegment syn;
    syn.src_ip = c.entry.switch_ip;
    syn.src_port = c.entry.port_r;
    syn.dst_ip = c.entry.dest_ip;
    syn.dst_port = c.entry.dest_port;
    syn.flags = kSyn;
    syn.seq = c.client_isn;
    out.to_server.push_back(syn);
    return out;
}

ProxyActions ConnMigration::on_server_segment(const TcpSegment& seg, SimTime now) {
    ProxyActions out;
    auto sit = server_to_client_.find(flow_key_of(seg));
    if (sit == server_to_client_.end()) {
        ++metrics_.unmatched_server;
        return out;
    }
    auto it = conns_.find(sit->second);
    assert(it != conns_.end());
    MigrationConn& c = it->second;

    if (c.phase == MigrationPhase::Migration) {
        if (seg.syn_ack() && seg.ack == seq_add(c.client_isn, 1)) {
            c.entry.delta_seq = seq_sub(c.cookie_isn, seg.seq);  // ISN_R - ISN_B
            c.entry.created = now;
            set_phase(c, MigrationPhase::Relay);

            TcpSegment final_ack;
            final_ack.src_ip = c.entry.switch_ip;
            final_ack.src_port = c.entry.port_r;
            final_ack.dst_ip = c.entry.dest_ip;
            final_ack.dst_port = c.entry.dest_port;
            final_ack.flags = kAck;
            final_ack.seq = seq_add(c.client_isn, 1);
            final_ack.ack = seq_add(seg.seq, 1);
            out.to_server.push_back(final_ack);

            PacketIn pin;
            pin.type = PacketInType::HandshakeResult;
            pin.trigger = seg;
            pin.handshake_ok = true;
            out.packet_ins.push_back(pin);

            for (const TcpSegment& p : c.pending) {
                out.to_server.push_back(translate(p, c.entry, TranslateDir::ClientToServer));
                ++metrics_.relayed_client;
                if (p.has(kFin)) c.fin_client = true;
            }
            c.pending.clear();
            return out;
        }
        if (seg.has(kRst)) {
            out.to_client.push_back(rst_to_client(c.client_flow));
            PacketIn pin;
            pin.type = PacketInType::HandshakeResult;
            pin.trigger = seg;
            pin.handshake_ok = false;
            out.packet_ins.push_back(pin);
            teardown(it, out);
            return out;
        }
        ++metrics_.unmatched_server;
        return out;
    }

    if (c.phase == MigrationPhase::Relay) {
        out.to_client.push_back(translate(seg, c.entry, TranslateDir::ServerToClient));
        ++metrics_.relayed_server;
        if (seg.has(kRst)) {
            teardown(it, out);
            return out;
        }
        if (seg.has(kFin)) c.fin_server = true;
        if (c.fin_client && c.fin_server) teardown(it, out);
        return out;
    }

    ++metrics_.unmatched_server;
    return out;
}

TcpSegment ConnMigration::translate(const TcpSegment& seg, const TranslationEntry& entry,
                                    TranslateDir dir) {
    TcpSegment out = seg;
    if (dir == TranslateDir::ClientToServer) {
        out.src_ip = entry.switch_ip;
        out.src_port = entry.port_r;
        out.ack = seq_sub(seg.ack, entry.delta_seq);
    } else {
        out.dst_ip = entry.ip_src;
        out.dst_port = entry.port_src;
        out.seq = seq_add(seg.seq, entry.delta_seq);
    }
    return out;
}

}  // namespace sdnsim
