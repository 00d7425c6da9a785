#include <doctest.h>

#include <set>

#include "sdnsim/rng.hpp"
#include "sdnsim/syn_cookie.hpp"

using namespace sdnsim;

TEST_SUITE_BEGIN("syn_cookie");

namespace {

CookieKey test_key() {
    CookieKey k;
    k.secret_hi = 0x0123456789abcdefULL;
    k.secret_lo = 0xfedcba9876543210ULL;
    k.epoch_len_s = 64;
    return k;
}

FlowKey random_flow(Rng& rng) {
    FlowKey f;
    f.src_ip = IpAddress{rng.next_u32()};
    f.dst_ip = IpAddress{rng.next_u32()};
    f.src_port = static_cast<std::uint16_t>(rng.below(65536));
    f.dst_port = static_cast<std::uint16_t>(rng.below(65536));
    return f;
}

}  // namespace

TEST_CASE("same key, flow and epoch give the identical ISN") {
    const CookieKey key = test_key();
    Rng rng(1, 0);
    const FlowKey flow = random_flow(rng);
    CHECK(issue_cookie(key, flow, 1000) == issue_cookie(key, flow, 1000));
    // anywhere within one epoch
    CHECK(issue_cookie(key, flow, 0) == issue_cookie(key, flow, 63 * kUsPerSecond));
}

TEST_CASE("adjacent epochs give different ISNs") {
    const CookieKey key = test_key();
    Rng rng(2, 0);
    for (int i = 0; i < 100; ++i) {
        const FlowKey flow = random_flow(rng);
        const SimTime e0 = SimTime(i) * 64 * kUsPerSecond;
        const SimTime e1 = e0 + 64 * kUsPerSecond;
        CHECK(issue_cookie(key, flow, e0) != issue_cookie(key, flow, e1));
    }
}

TEST_CASE("1000 random flow pairs collide nowhere") {
    const CookieKey key = test_key();
    Rng rng(3, 0);
    int collisions = 0;
    for (int i = 0; i < 1000; ++i) {
        const FlowKey a = random_flow(rng);
        FlowKey b = random_flow(rng);
        if (b == a) b.src_port ^= 1;
        if (issue_cookie(key, a, 500) == issue_cookie(key, b, 500)) ++collisions;
    }
    CHECK(collisions == 0);
}

TEST_CASE("flows differing in one port bit disagree") {
    const CookieKey key = test_key();
    Rng rng(4, 0);
    for (int i = 0; i < 200; ++i) {
        const FlowKey a = random_flow(rng);
        FlowKey b = a;
        b.src_port ^= std::uint16_t(1) << rng.below(16);
        CHECK(issue_cookie(key, a, 500) != issue_cookie(key, b, 500));
    }
}

TEST_CASE("round trip validates within the epoch") {
    const CookieKey key = test_key();
    Rng rng(5, 0);
    for (int i = 0; i < 200; ++i) {
        const FlowKey flow = random_flow(rng);
        const SimTime issued = rng.below(1000) * kUsPerSecond;
        const std::uint32_t isn = issue_cookie(key, flow, issued);
        const SimTime delta = rng.below(64 * kUsPerSecond);
        CHECK(validate_cookie(key, flow, isn, issued + delta));
    }
}

TEST_CASE("echo from the immediately previous epoch still validates") {
    const CookieKey key = test_key();
    Rng rng(6, 0);
    const FlowKey flow = random_flow(rng);
    const SimTime t = 10 * 64 * kUsPerSecond + 1;  // just entered epoch 10
    const std::uint32_t isn = issue_cookie(key, flow, t - 2);  // epoch 9
    CHECK(validate_cookie(key, flow, isn, t));
}

TEST_CASE("flipped low bits are rejected") {
    const CookieKey key = test_key();
    Rng rng(7, 0);
    const FlowKey flow = random_flow(rng);
    const std::uint32_t isn = issue_cookie(key, flow, 1000);
    for (int i = 0; i < 8; ++i) {
        const std::uint32_t bad = isn ^ (1u << rng.below(29));
        CHECK(!validate_cookie(key, flow, bad, 1000));
    }
}

TEST_CASE("echo three epochs later has expired") {
    const CookieKey key = test_key();
    Rng rng(8, 0);
    const FlowKey flow = random_flow(rng);
    const SimTime issued = 5 * 64 * kUsPerSecond;
    const std::uint32_t isn = issue_cookie(key, flow, issued);
    CHECK(validate_cookie(key, flow, isn, issued + 64 * kUsPerSecond));       // previous epoch
    CHECK(!validate_cookie(key, flow, isn, issued + 2 * 64 * kUsPerSecond));  // window closed
    CHECK(!validate_cookie(key, flow, isn, issued + 3 * 64 * kUsPerSecond));
}

TEST_CASE("acceptance window is exactly current and previous epoch") {
    const CookieKey key = test_key();
    Rng rng(9, 0);
    for (int i = 0; i < 50; ++i) {
        const FlowKey flow = random_flow(rng);
        const SimTime issued = (2 + rng.below(100)) * 64 * kUsPerSecond + rng.below(64000000);
        const std::uint32_t isn = issue_cookie(key, flow, issued);
        const std::uint64_t epoch = issued / (64 * kUsPerSecond);
        for (std::uint64_t e = epoch > 2 ? epoch - 2 : 0; e < epoch + 4; ++e) {
            const bool expect = e == epoch || e == epoch + 1;
            CHECK(validate_cookie(key, flow, isn, e * 64 * kUsPerSecond + 5) == expect);
        }
    }
}

TEST_SUITE_END();
