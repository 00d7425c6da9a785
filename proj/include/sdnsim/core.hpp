#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

namespace sdnsim {

// Simulated clock: microseconds since the start of a run.
using SimTime = std::uint64_t;

inline constexpr SimTime kUsPerSecond = 1'000'000;
inline constexpr SimTime kSimTimeMax = ~SimTime{0};

inline SimTime seconds(double s) { return static_cast<SimTime>(s * 1e6 + 0.5); }
inline double to_seconds(SimTime t) { return static_cast<double>(t) / 1e6; }

// IPv4 address, host byte order.
struct IpAddress {
    std::uint32_t value = 0;

    auto operator<=>(const IpAddress&) const = default;

    static constexpr IpAddress of(std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d) {
        return IpAddress{(std::uint32_t(a) << 24) | (std::uint32_t(b) << 16) |
                         (std::uint32_t(c) << 8) | std::uint32_t(d)};
    }

    std::string str() const;
};

enum TcpFlag : std::uint8_t {
    kSyn = 1 << 0,
    kAck = 1 << 1,
    kFin = 1 << 2,
    kRst = 1 << 3,
};

std::string flags_str(std::uint8_t flags);

// Sequence-number arithmetic is modulo 2^32; unsigned wraparound is exactly that.
inline std::uint32_t seq_add(std::uint32_t a, std::uint32_t b) { return a + b; }
inline std::uint32_t seq_sub(std::uint32_t a, std::uint32_t b) { return a - b; }

struct TcpSegment {
    IpAddress src_ip;
    IpAddress dst_ip;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    std::uint8_t flags = 0;
    std::uint32_t seq = 0;
    std::uint32_t ack = 0;
    std::uint32_t payload_len = 0;

    bool has(TcpFlag f) const { return (flags & f) != 0; }
    bool pure_syn() const { return has(kSyn) && !has(kAck); }
    bool syn_ack() const { return has(kSyn) && has(kAck); }

    // frame size on the wire; headers are folded into a flat 64-byte cost
    std::uint32_t wire_bytes() const { return 64 + payload_len; }
};

// Directed 4-tuple identifying one direction of a TCP connection.
struct FlowKey {
    IpAddress src_ip;
    IpAddress dst_ip;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;

    auto operator<=>(const FlowKey&) const = default;
};

inline FlowKey flow_key_of(const TcpSegment& s) {
    return FlowKey{s.src_ip, s.dst_ip, s.src_port, s.dst_port};
}

inline FlowKey reversed(const FlowKey& k) {
    return FlowKey{k.dst_ip, k.src_ip, k.dst_port, k.src_port};
}

inline std::uint64_t mix64(std::uint64_t x) {
    x ^= x >> 30;
    x *= 0xbf58476d1ce4e5b9ULL;
    x ^= x >> 27;
    x *= 0x94d049bb133111ebULL;
    x ^= x >> 31;
    return x;
}

struct FlowKeyHash {
    std::size_t operator()(const FlowKey& k) const {
        std::uint64_t a = (std::uint64_t(k.src_ip.value) << 32) | k.dst_ip.value;
        std::uint64_t b = (std::uint64_t(k.src_port) << 16) | k.dst_port;
        return static_cast<std::size_t>(mix64(a ^ (b * 0x9e3779b97f4a7c15ULL)));
    }
};

}  // namespace sdnsim
