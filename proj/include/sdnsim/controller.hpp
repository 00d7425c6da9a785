#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <optional>
#include <vector>

#include "sdnsim/core.hpp"
#include "sdnsim/of_switch.hpp"

namespace sdnsim {

enum class PacketInType : std::uint8_t { TableMiss, MigrationReport, HandshakeResult };

struct PacketIn {
    PacketInType type = PacketInType::TableMiss;
    TcpSegment trigger;
    NodeId ingress = kNoNode;
    bool handshake_ok = false;
    SimTime enqueued_at = 0;
};

struct Verdict {
    FlowKey flow;
    bool allow = false;
};

struct ServiceOutput {
    std::vector<FlowRule> installs;        // learning pair for table misses
    std::optional<TcpSegment> packet_out;  // trigger released after rule install
    std::optional<Verdict> verdict;        // reply to a migration report
};

struct ControllerConfig {
    double service_rate = 2000.0;  // packet-ins per second, deterministic service
    std::size_t queue_capacity = 10000;
    double saturation_latency_s = 0;  // queue delay that counts as saturated; 0 = drops only
};

// Capacity-limited control plane. Consumes one packet-in per service step and
// answers table misses with a learning-style rule pair: forward toward the
// destination, reverse out the ingress port the request arrived on.
class Controller {
 public:
    Controller(const ControllerConfig& cfg, std::function<NodeId(IpAddress)> locate);

    // false = queue full; the packet-in is dropped and counted
    bool enqueue_packet_in(const PacketIn& pin, SimTime now);

    // Caller schedules a service completion at now + service_time() whenever
    // this returns true.
    bool begin_service_if_idle();

    // Dequeues exactly one packet-in; no-op on an empty queue. Leaves the
    // controller busy iff a backlog remains (caller reschedules).
    ServiceOutput service_step(SimTime now);

    SimTime service_time() const { return svc_us_; }
    bool busy() const { return busy_; }
    std::size_t queue_len() const { return queue_.size(); }

    std::uint64_t enqueued() const { return enqueued_; }
    std::uint64_t processed() const { return processed_; }
    std::uint64_t dropped() const { return dropped_; }
    std::optional<SimTime> first_drop_time() const { return first_drop_; }

    // first drop, or first service whose queue delay crossed the threshold
    std::optional<SimTime> first_saturation_time() const { return first_saturated_; }

 private:
    ControllerConfig cfg_;
    std::function<NodeId(IpAddress)> locate_;
    std::deque<PacketIn> queue_;
    SimTime svc_us_;
    bool busy_ = false;
    std::uint64_t enqueued_ = 0;
    std::uint64_t processed_ = 0;
    std::uint64_t dropped_ = 0;
    std::optional<SimTime> first_drop_;
    std::optional<SimTime> first_saturated_;
};

}  // namespace sdnsim
