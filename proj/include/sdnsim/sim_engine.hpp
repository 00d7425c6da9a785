#pragma once

#include <cstdint>
#include <cstdio>
#include <deque>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <unordered_map>
#include <vector>

#include "sdnsim/conn_migration.hpp"
#include "sdnsim/controller.hpp"
#include "sdnsim/core.hpp"
#include "sdnsim/lineswitch.hpp"
#include "sdnsim/of_switch.hpp"
#include "sdnsim/policy.hpp"
#include "sdnsim/traffic_gen.hpp"

namespace sdnsim {

// fixed topology: three hosts and a controller around one switch
inline constexpr NodeId kSwitchNode = 0;
inline constexpr NodeId kControllerNode = 1;
inline constexpr NodeId kServerNode = 2;
inline constexpr NodeId kClientNode = 3;
inline constexpr NodeId kAttackerNode = 4;
inline constexpr int kNodeCount = 5;

enum class EventKind : std::uint8_t {
    SegmentArrival,
    PacketInArrival,
    CtrlDeliver,
    ControllerService,
    TimerExpiry,
    GeneratorWakeup,
};

enum class TimerKind : std::uint8_t { None, HandshakeTimeout, GcSweep };

struct Event {
    SimTime at = 0;
    std::uint64_t seqno = 0;
    EventKind kind = EventKind::SegmentArrival;
    TcpSegment seg;
    FlowKey flow;  // HandshakeTimeout payload
    NodeId node = kNoNode;
    NodeId ingress = kNoNode;
    TimerKind timer = TimerKind::None;
    std::uint8_t pin_type = 0;  // PacketInArrival payload
    bool pin_ok = false;
    std::uint32_t gen = 0;
    std::uint32_t gen_timer = 0;
};

struct EventAfter {
    bool operator()(const Event& a, const Event& b) const {
        if (a.at != b.at) return a.at > b.at;
        return a.seqno > b.seqno;
    }
};

struct LinkConfig {
    double bandwidth_mbps = 0;  // 0 = infinite
    double rtt_ms = 0;          // one-way delay = rtt/2
};

enum class StopPredicate : std::uint8_t {
    None,
    BufferSaturated,
    ControllerSaturated,
    PortsExhausted,
};

struct StopSpec {
    SimTime at = kSimTimeMax;
    StopPredicate predicate = StopPredicate::None;
};

struct SimConfig {
    Policy policy = Policy::Vanilla;
    MigrationConfig migration;  // switch_addresses filled from address_count when empty
    std::uint32_t switch_address_count = 1;
    LineSwitchConfig lineswitch;
    ControllerConfig controller;
    std::size_t flow_table_capacity = 100000;
    LinkConfig host_link;
    LinkConfig ctrl_link;
    SimTime proxy_op_delay = 0;  // processing cost per proxied emission
    SimTime gc_interval = 5'000'000;
    std::vector<WorkloadSpec> workloads;
    std::uint64_t seed = 1;
    std::string trace_path;  // wire log, empty = off
};

struct SimulationReport {
    std::optional<double> saturation_time;  // seconds; buffer refusal or controller drop
    std::uint64_t packet_ins = 0;
    std::uint64_t controller_drops = 0;
    std::vector<double> page_latencies;
    std::optional<double> retrieval_success_rate;
    std::uint64_t peak_translation_entries = 0;
    std::uint64_t blacklist_events = 0;
    // diagnostics
    std::uint64_t syn_proxied = 0;
    std::uint64_t syn_forwarded = 0;
    std::uint64_t syn_blacklist_dropped = 0;
    std::uint64_t admitted_conns = 0;
    std::uint64_t buffer_refusals = 0;
    std::uint64_t ports_exhausted = 0;
    std::uint64_t handshake_failures = 0;
    std::uint64_t pages_started = 0;
    std::uint64_t pages_completed = 0;
    std::uint64_t pages_failed = 0;
    std::uint64_t live_migration_conns = 0;
    std::uint64_t source_records = 0;
    double end_time = 0;
    std::uint32_t trial = 0;
    bool failed = false;  // trial aborted; metrics are not meaningful
};

struct EngineMetrics {
    std::uint64_t packet_ins = 0;  // sent toward the controller, dropped included
    std::uint64_t rules_installed = 0;
    std::uint64_t rules_rejected = 0;
    std::uint64_t switch_forwarded = 0;
    std::uint64_t switch_dropped = 0;
    std::uint64_t unroutable_drops = 0;
    std::uint64_t host_drops = 0;
    std::uint64_t syn_proxied = 0;
    std::uint64_t syn_forwarded = 0;
    std::uint64_t syn_blacklist_dropped = 0;
    std::uint64_t handshake_failures = 0;
};

// Deterministic event loop over the fixed topology. One instance per trial;
// nothing is shared between concurrently running simulations.
class Simulation {
 public:
    explicit Simulation(const SimConfig& cfg);
    ~Simulation();
    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    SimulationReport run_until(const StopSpec& stop);

    // event.at must not precede the clock; violating that is a programming
    // error and aborts the run
    void schedule(Event e);

    SimTime now() const { return clock_; }
    const EngineMetrics& metrics() const { return metrics_; }
    const Controller& controller() const { return ctrl_; }
    const ConnMigration* migration() const { return migration_.get(); }
    const SynPolicy& policy() const { return *policy_; }
    const OfSwitch& of_switch() const { return switch_; }

    IpAddress server_ip() const { return server_ip_; }
    IpAddress client_ip() const { return client_ip_; }

 private:
    struct LinkState {
        SimTime to_switch_busy = 0;
        SimTime from_switch_busy = 0;
    };

    void dispatch(const Event& e);
    void switch_rx(const TcpSegment& seg, NodeId ingress, SimTime now);
    void host_rx(NodeId node, const TcpSegment& seg, SimTime now);
    void apply_actions(ProxyActions&& a, NodeId ingress, SimTime now);
    void apply_service_output(ServiceOutput&& out, SimTime now);
    void send_packet_in(PacketIn pin, SimTime now);
    void enqueue_packet_in(const PacketIn& pin, SimTime now);
    void deliver_host_to_switch(NodeId host, const TcpSegment& seg, SimTime now);
    void deliver_switch_to_node(NodeId node, const TcpSegment& seg, SimTime earliest);
    void emit_from_switch(const TcpSegment& seg, SimTime earliest);
    void run_generator(std::uint32_t idx, std::uint32_t timer_id, SimTime now);
    void flush_gen_output(std::uint32_t idx, GenOutput& out, SimTime now);
    void arm_gc(SimTime now);
    bool stop_predicate_hit(StopPredicate pred) const;
    NodeId route(IpAddress ip) const;
    bool owns_ip(NodeId node, IpAddress ip) const;
    SimTime tx_time(const LinkConfig& link, const TcpSegment& seg) const;
    void trace_arrival(const Event& e) const;
    void server_reflect(const TcpSegment& seg, std::vector<TcpSegment>& out) const;
    SimulationReport build_report();

    SimConfig cfg_;
    SimTime clock_ = 0;
    std::uint64_t next_seqno_ = 0;
    std::uint64_t non_gc_pending_ = 0;  // gc sweeps alone must not keep a run alive
    std::priority_queue<Event, std::vector<Event>, EventAfter> queue_;

    OfSwitch switch_;
    Controller ctrl_;
    std::unique_ptr<SynPolicy> policy_;
    std::unique_ptr<ConnMigration> migration_;
    std::vector<std::unique_ptr<Generator>> generators_;
    std::vector<NodeId> gen_node_;

    IpAddress server_ip_;
    std::uint16_t server_port_ = 80;
    IpAddress client_ip_;
    // attacker-owned address range [attacker_lo_, attacker_hi_)
    std::uint32_t attacker_lo_ = 0;
    std::uint32_t attacker_hi_ = 0;
    std::vector<IpAddress> switch_addrs_;
    std::uint64_t server_isn_secret_ = 0;

    LinkState links_[kNodeCount];
    SimTime host_one_way_ = 0;
    SimTime ctrl_one_way_ = 0;

    std::unordered_map<FlowKey, IpAddress, FlowKeyHash> pending_hs_;
    std::deque<ServiceOutput> ctrl_outbox_;
    bool gc_armed_ = false;

    EngineMetrics metrics_;
    std::FILE* trace_ = nullptr;
};

}  // namespace sdnsim
