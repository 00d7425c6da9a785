#pragma once

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <utility>
#include <vector>

#include "sdnsim/core.hpp"
#include "sdnsim/rng.hpp"

namespace sdnsim {

enum class WorkloadKind : std::uint8_t {
    LegitClient,
    SpoofedSynFlood,
    BufferSaturation,
    PortExhaustion,
};

struct WorkloadSpec {
    WorkloadKind kind = WorkloadKind::LegitClient;
    double rate_mbps = 0;  // attack bandwidth; converted per kind
    double rate_cps = 0;   // explicit events/s, overrides rate_mbps when set
    std::uint32_t src_pool = 1;
    IpAddress src_base;  // filled from the topology when left zero
    IpAddress dst_ip;
    std::uint16_t dst_port = 80;
    SimTime start = 0;
    SimTime stop = kSimTimeMax;
    std::uint64_t max_conns = 0;       // 0 = unbounded
    std::uint32_t page_bytes = 1024;   // request and response payload
    SimTime think_time = 100'000;      // pause between page fetches
    SimTime client_timeout = 5'000'000;
};

// calibrated handshake throughput: 780 connections per second per Mbps
double bandwidth_to_conn_rate(double mbps);

// pure SYN floods are paced by 64-byte frames
double spoofed_syn_rate(double mbps);

// events per second this spec paces at
double effective_rate(const WorkloadSpec& spec);

struct GenOutput {
    std::vector<TcpSegment> emit;                            // leave the host now
    std::vector<std::pair<SimTime, std::uint32_t>> timers;   // absolute wakeups
};

struct ClientStats {
    std::uint64_t started = 0;
    std::uint64_t completed = 0;
    std::uint64_t failed = 0;
    std::vector<double> latencies;  // seconds, completed fetches only
};

// Workload generators own their RNG stream and are driven by the event loop
// through timers (wakeup 0 is the paced emission chain) and by deliveries to
// their host.
class Generator {
 public:
    virtual ~Generator() = default;

    virtual void on_timer(std::uint32_t id, SimTime now, GenOutput& out) = 0;
    virtual void on_segment(const TcpSegment&, SimTime, GenOutput&) {}
    virtual bool accepts(const TcpSegment&) const { return false; }
    virtual void collect(ClientStats&) const {}

    const WorkloadSpec& spec() const { return spec_; }

 protected:
    Generator(const WorkloadSpec& spec, Rng rng) : spec_(spec), rng_(rng) {}

    // drift-free pacing: emission n happens at start + n/rate
    SimTime paced_at(std::uint64_t n) const;

    WorkloadSpec spec_;
    Rng rng_;
};

class SpoofedSynFloodGen final : public Generator {
 public:
    SpoofedSynFloodGen(const WorkloadSpec& spec, Rng rng) : Generator(spec, rng) {}
    void on_timer(std::uint32_t id, SimTime now, GenOutput& out) override;

 private:
    std::uint64_t n_ = 0;
};

// Complete-handshake flood from real addresses: distinct source ports until
// one address' port space is spent, then the next pool address. Connections
// are held open, never closed.
class ConnFloodGen final : public Generator {
 public:
    static constexpr std::uint32_t kPortsPerAddr = 65535;  // ports 1..65535

    ConnFloodGen(const WorkloadSpec& spec, Rng rng) : Generator(spec, rng) {}
    void on_timer(std::uint32_t id, SimTime now, GenOutput& out) override;
    void on_segment(const TcpSegment& seg, SimTime now, GenOutput& out) override;
    bool accepts(const TcpSegment& seg) const override;

 private:
    std::uint64_t n_ = 0;
};

// One page fetch at a time: handshake, page-sized request, page-sized
// response, FIN exchange, then think time before the next fetch. A fetch
// without a response inside the timeout counts as failed.
class LegitClientGen final : public Generator {
 public:
    LegitClientGen(const WorkloadSpec& spec, Rng rng) : Generator(spec, rng) {}
    void on_timer(std::uint32_t id, SimTime now, GenOutput& out) override;
    void on_segment(const TcpSegment& seg, SimTime now, GenOutput& out) override;
    bool accepts(const TcpSegment& seg) const override;
    void collect(ClientStats& stats) const override;

 private:
    enum class TxnState : std::uint8_t { AwaitSynAck, AwaitResponse, AwaitFinAck };

    struct Txn {
        FlowKey flow;
        std::uint32_t isn = 0;
        SimTime syn_at = 0;
        TxnState state = TxnState::AwaitSynAck;
    };

    void start_txn(SimTime now, GenOutput& out);
    void finish_txn(std::uint32_t id, SimTime now, GenOutput& out);

    std::unordered_map<std::uint32_t, Txn> live_;
    std::unordered_map<FlowKey, std::uint32_t, FlowKeyHash> by_flow_;
    ClientStats stats_;
};

std::unique_ptr<Generator> make_generator(const WorkloadSpec& spec, Rng rng);

// Paced emissions of a spec inside [from, until), for inspection; reactive
// traffic (handshake completions, page exchanges) only exists inside a
// simulation. For LegitClient this is the first SYN only.
std::vector<std::pair<SimTime, TcpSegment>> next_events(const WorkloadSpec& spec, SimTime from,
                                                        SimTime until, std::uint64_t seed);

}  // namespace sdnsim
