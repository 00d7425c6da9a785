#pragma once

#include <cstdint>

#include "sdnsim/core.hpp"

namespace sdnsim {

enum class Policy : std::uint8_t { Vanilla, AvantGuard, LineSwitch };

enum class SynDecision : std::uint8_t { Proxy, Forward, Drop };

// Per-SYN admission policy in front of the proxy machinery. Vanilla forwards
// everything into the pipeline; avantguard proxies everything; lineswitch
// decides per source.
class SynPolicy {
 public:
    virtual ~SynPolicy() = default;

    virtual SynDecision classify_syn(IpAddress src, SimTime now) = 0;

    virtual void on_handshake_complete(IpAddress, SimTime) {}
    // returns the blacklist duration in seconds computed for this failure
    virtual double on_handshake_failed(IpAddress, SimTime) { return 0.0; }

    virtual void note_conn_opened(IpAddress) {}
    virtual void note_conn_closed(IpAddress) {}

    virtual std::size_t gc_expired(SimTime) { return 0; }

    // nonzero enables the proxied-handshake failure detector
    virtual SimTime handshake_timeout() const { return 0; }
    virtual bool wants_gc() const { return false; }
    virtual std::uint64_t blacklist_events() const { return 0; }
    virtual std::size_t record_count() const { return 0; }
};

class VanillaPolicy final : public SynPolicy {
 public:
    SynDecision classify_syn(IpAddress, SimTime) override { return SynDecision::Forward; }
};

class ProxyAllPolicy final : public SynPolicy {
 public:
    SynDecision classify_syn(IpAddress, SimTime) override { return SynDecision::Proxy; }
};

}  // namespace sdnsim
