#pragma once

#include <cstdint>
#include <unordered_map>

#include "sdnsim/core.hpp"
#include "sdnsim/policy.hpp"
#include "sdnsim/rng.hpp"

namespace sdnsim {

struct LineSwitchConfig {
    double p_proxy = 0.05;   // probability of proxying once a source completed
    double t_base_s = 5.0;   // base blacklist duration
    std::uint64_t rng_seed = 0;
    bool blacklist_enabled = true;
    // false: first failure is blacklisted for t_base (duration t*2^(count-1));
    // true: literal t*2^count, so the first failure already doubles
    bool first_penalty_doubles = false;
    double handshake_timeout_s = 3.0;  // failure detector for proxied SYNs
    double idle_horizon_s = 60.0;      // gc removes records idle this long
};

// Per-source state. Records are created lazily, on the first completed or
// first failed proxied handshake, never for a bare SYN; a spoofed flood
// therefore grows this table only through its eventual timeouts.
struct SourceRecord {
    IpAddress ip;
    bool completed_once = false;
    std::uint32_t fail_count = 0;  // proxied-but-uncompleted handshakes
    SimTime blacklist_until = 0;   // 0 = none
    SimTime last_activity = 0;
    std::uint32_t live_proxied = 0;
};

// Proxy every connection from a source until one completes; afterwards proxy
// with probability p_proxy and otherwise hand the SYN to the plain pipeline.
// Sources whose proxied handshakes fail are blacklisted for exponentially
// growing periods.
class LineSwitchPolicy final : public SynPolicy {
 public:
    explicit LineSwitchPolicy(const LineSwitchConfig& cfg);

    SynDecision classify_syn(IpAddress src, SimTime now) override;
    void on_handshake_complete(IpAddress src, SimTime now) override;
    double on_handshake_failed(IpAddress src, SimTime now) override;

    void note_conn_opened(IpAddress src) override;
    void note_conn_closed(IpAddress src) override;

    std::size_t gc_expired(SimTime now) override;

    SimTime handshake_timeout() const override { return seconds(cfg_.handshake_timeout_s); }
    bool wants_gc() const override { return true; }
    std::uint64_t blacklist_events() const override { return blacklist_events_; }
    std::size_t record_count() const override { return records_.size(); }

    const SourceRecord* record(IpAddress src) const;

 private:
    SourceRecord& get_or_create(IpAddress src, SimTime now);

    LineSwitchConfig cfg_;
    std::unordered_map<std::uint32_t, SourceRecord> records_;
    Rng rng_;
    std::uint64_t blacklist_events_ = 0;
};

}  // namespace sdnsim
