#include "sdnsim/lineswitch.hpp"

#include <algorithm>

namespace sdnsim {

LineSwitchPolicy::LineSwitchPolicy(const LineSwitchConfig& cfg)
    : cfg_(cfg), rng_(cfg.rng_seed, 0) {}

SourceRecord& LineSwitchPolicy::get_or_create(IpAddress src, SimTime now) {
    auto [it, fresh] = records_.try_emplace(src.value);
    if (fresh) {
        it->second.ip = src;
        it->second.last_activity = now;
    }
    return it->second;
}

const SourceRecord* LineSwitchPolicy::record(IpAddress src) const {
    auto it = records_.find(src.value);
    return it == records_.end() ? nullptr : &it->second;
}

SynDecision LineSwitchPolicy::classify_syn(IpAddress src, SimTime now) {
    auto it = records_.find(src.value);
    if (it == records_.end()) return SynDecision::Proxy;  // never seen, never completed

    SourceRecord& rec = it->second;
    if (cfg_.blacklist_enabled && rec.blacklist_until != 0 && now < rec.blacklist_until) {
        return SynDecision::Drop;  // silent; blacklisted traffic refreshes nothing
    }
    rec.last_activity = now;
    if (!rec.completed_once) return SynDecision::Proxy;
    return rng_.next_double() < cfg_.p_proxy ? SynDecision::Proxy : SynDecision::Forward;
}

void LineSwitchPolicy::on_handshake_complete(IpAddress src, SimTime now) {
    SourceRecord& rec = get_or_create(src, now);
    rec.completed_once = true;  // idempotent; fail_count untouched
    rec.last_activity = now;
}

double LineSwitchPolicy::on_handshake_failed(IpAddress src, SimTime now) {
    SourceRecord& rec = get_or_create(src, now);
    ++rec.fail_count;
    const std::uint32_t shift =
        std::min<std::uint32_t>(cfg_.first_penalty_doubles ? rec.fail_count : rec.fail_count - 1,
                                40);
    const double duration_s = cfg_.t_base_s * static_cast<double>(1ull << shift);
    if (cfg_.blacklist_enabled) {
        rec.blacklist_until = now + seconds(duration_s);
        ++blacklist_events_;
    }
    rec.last_activity = now;
    return duration_s;
}

void LineSwitchPolicy::note_conn_opened(IpAddress src) {
    auto it = records_.find(src.value);
    if (it != records_.end()) ++it->second.live_proxied;
}

void LineSwitchPolicy::note_conn_closed(IpAddress src) {
    auto it = records_.find(src.value);
    if (it != records_.end() && it->second.live_proxied > 0) --it->second.live_proxied;
}

std::size_t LineSwitchPolicy::gc_expired(SimTime now) {
    const SimTime horizon = seconds(cfg_.idle_horizon_s);
    std::size_t removed = 0;
    for (auto it = records_.begin(); it != records_.end();) {
        const SourceRecord& r = it->second;
        bool expired;
        if (r.live_proxied > 0) {
            expired = false;
        } else if (r.blacklist_until != 0) {
            // once the penalty lapsed and nothing arrived since, the record
            // carries no information worth keeping
            expired = now > r.blacklist_until && r.last_activity <= r.blacklist_until;
        } else {
            expired = now - r.last_activity >= horizon;
        }
        if (expired) {
            it = records_.erase(it);
            ++removed;
        } else {
            ++it;
        }
    }
    return removed;
}

}  // namespace sdnsim
