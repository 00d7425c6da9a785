#include "sdnsim/syn_cookie.hpp"

namespace sdnsim {
namespace {

inline std::uint64_t rotl64(std::uint64_t x, int b) { return (x << b) | (x >> (64 - b)); }

// SipHash-2-4 over a fixed 16-byte message (packed flow tuple + counter).
std::uint64_t siphash(std::uint64_t k0, std::uint64_t k1, std::uint64_t m0, std::uint64_t m1) {
    std::uint64_t v0 = 0x736f6d6570736575ULL ^ k0;
    std::uint64_t v1 = 0x646f72616e646f6dULL ^ k1;
    std::uint64_t v2 = 0x6c7967656e657261ULL ^ k0;
    std::uint64_t v3 = 0x7465646279746573ULL ^ k1;

    auto sipround = [&] {
        v0 += v1;
        v1 = rotl64(v1, 13);
        v1 ^= v0;
        v0 = rotl64(v0, 32);
        v2 += v3;
        v3 = rotl64(v3, 16);
        v3 ^= v2;
        v0 += v3;
        v3 = rotl64(v3, 21);
        v3 ^= v0;
        v2 += v1;
        v1 = rotl64(v1, 17);
        v1 ^= v2;
        v2 = rotl64(v2, 32);
    };

    v3 ^= m0;
    sipround();
    sipround();
    v0 ^= m0;
    v3 ^= m1;
    sipround();
    sipround();
    v0 ^= m1;

    const std::uint64_t len_tag = 16ULL << 56;
    v3 ^= len_tag;
    sipround();
    sipround();
    v0 ^= len_tag;

    v2 ^= 0xff;
    sipround();
    sipround();
    sipround();
    sipround();
    return v0 ^ v1 ^ v2 ^ v3;
}

std::uint64_t epoch_of(const CookieKey& key, SimTime now) {
    return now / (SimTime(key.epoch_len_s) * kUsPerSecond);
}

std::uint32_t cookie_for_epoch(const CookieKey& key, const FlowKey& flow, std::uint64_t epoch) {
    const std::uint64_t m0 = (std::uint64_t(flow.src_ip.value) << 32) | flow.dst_ip.value;
    const std::uint64_t m1 = (std::uint64_t(flow.src_port) << 48) |
                             (std::uint64_t(flow.dst_port) << 32) | (epoch & 0xffffffffULL);
    const std::uint64_t h = siphash(key.secret_hi, key.secret_lo, m0, m1);
    const std::uint32_t counter_bits = std::uint32_t(epoch & 7) << 29;
    return counter_bits | (static_cast<std::uint32_t>(h) & 0x1fffffffu);
}

}  // namespace

std::uint32_t issue_cookie(const CookieKey& key, const FlowKey& flow, SimTime now) {
    return cookie_for_epoch(key, flow, epoch_of(key, now));
}

bool validate_cookie(const CookieKey& key, const FlowKey& flow, std::uint32_t echoed_isn,
                     SimTime now) {
    const std::uint64_t e = epoch_of(key, now);
    if (cookie_for_epoch(key, flow, e) == echoed_isn) return true;
    return e > 0 && cookie_for_epoch(key, flow, e - 1) == echoed_isn;
}

}  // namespace sdnsim
