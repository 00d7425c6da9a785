#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sdnsim/controller.hpp"
#include "sdnsim/core.hpp"
#include "sdnsim/syn_cookie.hpp"

namespace sdnsim {

// Per-proxied-connection translation state.
struct TranslationEntry {
    IpAddress ip_src;  // initiator of the connection
    std::uint16_t port_src = 0;
    std::uint16_t port_r = 0;     // switch-side port toward the server
    std::uint32_t delta_seq = 0;  // ISN_R - ISN_B, mod 2^32
    IpAddress dest_ip;
    std::uint16_t dest_port = 0;
    IpAddress switch_ip;  // address that owns port_r
    SimTime created = 0;
};

// Byte-accounted admission control for proxied-connection state. A slot is
// charged from cookie validation until teardown, so connections still
// awaiting a controller verdict count against the buffer too.
class TranslationBuffer {
 public:
    TranslationBuffer(std::uint64_t capacity_bytes, std::uint32_t entry_bytes)
        : capacity_bytes_(capacity_bytes), entry_bytes_(entry_bytes) {}

    bool try_reserve() {
        if ((live_ + 1) * entry_bytes_ > capacity_bytes_) return false;
        ++live_;
        if (live_ > peak_) peak_ = live_;
        return true;
    }

    void release() {
        if (live_ > 0) --live_;
    }

    std::uint64_t live() const { return live_; }
    std::uint64_t peak() const { return peak_; }
    std::uint64_t bytes_used() const { return live_ * entry_bytes_; }
    std::uint64_t capacity_bytes() const { return capacity_bytes_; }
    std::uint64_t capacity_entries() const { return capacity_bytes_ / entry_bytes_; }

 private:
    std::uint64_t capacity_bytes_;
    std::uint64_t entry_bytes_;
    std::uint64_t live_ = 0;
    std::uint64_t peak_ = 0;
};

// Switch-side source ports toward each destination. Ports below 1024 are
// reserved, leaving 64512 usable ports per switch address per destination;
// extra switch addresses extend the pool linearly.
class PortAllocator {
 public:
    static constexpr std::uint32_t kFirstPort = 1024;
    static constexpr std::uint32_t kUsablePorts = 65536 - kFirstPort;  // 64512

    explicit PortAllocator(std::vector<IpAddress> switch_addresses)
        : addrs_(std::move(switch_addresses)) {}

    std::optional<std::pair<IpAddress, std::uint16_t>> allocate(IpAddress dest_ip,
                                                                std::uint16_t dest_port);
    void release(IpAddress dest_ip, std::uint16_t dest_port, IpAddress switch_ip,
                 std::uint16_t port);

    std::uint64_t capacity_per_destination() const { return addrs_.size() * kUsablePorts; }
    std::uint64_t allocated(IpAddress dest_ip, std::uint16_t dest_port) const;

 private:
    struct DestState {
        std::uint32_t cursor = 0;          // next never-used (address, port) index
        std::uint32_t live = 0;
        std::vector<std::uint32_t> freed;  // released indices, reused LIFO
    };

    static std::uint64_t dest_key(IpAddress ip, std::uint16_t port) {
        return (std::uint64_t(ip.value) << 16) | port;
    }

    std::vector<IpAddress> addrs_;
    std::unordered_map<std::uint64_t, DestState> dests_;
};

enum class MigrationPhase : std::uint8_t { Classification, Report, Migration, Relay, Closed };

struct MigrationConn {
    MigrationPhase phase = MigrationPhase::Report;
    FlowKey client_flow;
    std::uint32_t cookie_isn = 0;  // ISN_R, the sequence number the client saw
    std::uint32_t client_isn = 0;  // ISN_A
    TranslationEntry entry;
    bool awaiting_first_data = false;  // delayed-migration sub-state of Report
    bool port_allocated = false;
    bool fin_client = false;
    bool fin_server = false;
    std::vector<TcpSegment> pending;  // client segments held until the relay opens
    SimTime created = 0;
};

enum class TranslateDir : std::uint8_t { ClientToServer, ServerToClient };

struct MigrationConfig {
    std::uint64_t buffer_bytes = 1ull << 22;
    std::uint32_t entry_bytes = 72;
    std::vector<IpAddress> switch_addresses;
    bool delayed = false;  // report only once the client sends its first data
    std::uint32_t pending_limit = 16;
};

// Effects of one proxy step; the event loop turns these into link deliveries
// and control-plane messages.
struct ProxyActions {
    std::vector<TcpSegment> to_client;
    std::vector<TcpSegment> to_server;
    std::vector<PacketIn> packet_ins;
    // cookie-validated handshake; fires even when admission then fails
    std::optional<std::pair<FlowKey, IpAddress>> completed;
    std::optional<IpAddress> admitted_src;  // connection state created
    std::optional<IpAddress> closed_src;    // connection state torn down
    bool refused_buffer_full = false;
    bool refused_ports = false;
};

struct MigrationMetrics {
    std::uint64_t syn_acks_sent = 0;
    std::uint64_t cookie_accepts = 0;
    std::uint64_t cookie_rejects = 0;
    std::uint64_t admitted = 0;
    std::uint64_t buffer_refusals = 0;
    std::optional<SimTime> first_buffer_refusal;
    std::uint64_t ports_exhausted = 0;
    std::optional<SimTime> first_ports_exhausted;
    std::uint64_t relayed_client = 0;
    std::uint64_t relayed_server = 0;
    std::uint64_t unmatched_server = 0;
    std::uint64_t dropped_client = 0;
    std::uint64_t teardowns = 0;
};

// SYN-proxy front end for the data plane: stateless cookie handshake with the
// client (classification), report to the controller, switch-initiated
// handshake with the server (migration), then relayed traffic with
// sequence/ACK translation. Nothing is stored for handshakes that never
// complete.
class ConnMigration {
 public:
    ConnMigration(const MigrationConfig& cfg, const CookieKey& cookie_key);

    ProxyActions on_client_segment(const TcpSegment& seg, SimTime now);
    ProxyActions on_controller_verdict(const FlowKey& flow, bool allow, SimTime now);
    ProxyActions on_server_segment(const TcpSegment& seg, SimTime now);

    // Pure rewrite: client->server rewrites the source to (switch, port_r)
    // and shifts the ACK down by delta_seq; server->client rewrites the
    // destination back to the initiator and shifts the sequence up.
    static TcpSegment translate(const TcpSegment& seg, const TranslationEntry& entry,
                                TranslateDir dir);

    bool has_conn(const FlowKey& client_flow) const { return conns_.count(client_flow) != 0; }
    std::optional<MigrationPhase> phase_of(const FlowKey& client_flow) const;
    std::size_t live_conns() const { return conns_.size(); }

    const TranslationBuffer& buffer() const { return buffer_; }
    const PortAllocator& ports() const { return ports_; }
    const MigrationMetrics& metrics() const { return metrics_; }

 private:
    using ConnMap = std::unordered_map<FlowKey, MigrationConn, FlowKeyHash>;

    static void set_phase(MigrationConn& c, MigrationPhase next);
    void teardown(ConnMap::iterator it, ProxyActions& out);

    MigrationConfig cfg_;
    CookieKey cookie_key_;
    TranslationBuffer buffer_;
    PortAllocator ports_;
    ConnMap conns_;
    // response demultiplexing: flow key of server-side segments -> client flow
    std::unordered_map<FlowKey, FlowKey, FlowKeyHash> server_to_client_;
    MigrationMetrics metrics_;
};

}  // namespace sdnsim
