// Acceptance suite: one numbered scenario per criterion, each printing a
// single PASS/FAIL line with the measured values and the pinned tolerance.
// Run with no arguments for all criteria, or pass criterion numbers.

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "sdnsim/experiment.hpp"
#include "sdnsim/syn_cookie.hpp"

using namespace sdnsim;

namespace {

std::string fmt(const char* pattern, ...) {
    char buf[2048];
    va_list args;
    va_start(args, pattern);
    std::vsnprintf(buf, sizeof(buf), pattern, args);
    va_end(args);
    return buf;
}

bool within_rel(double value, double target, double rel_tol) {
    return std::abs(value - target) <= rel_tol * std::abs(target);
}

std::string read_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

std::string csv_of(const ExperimentConfig& cfg, const std::vector<SimulationReport>& reports) {
    std::ostringstream os;
    write_csv(os, cfg, reports);
    return os.str();
}

ExperimentConfig spoofed_config(Policy policy, double mbps, double run_seconds,
                                std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.policy = policy;
    cfg.seed = seed;
    cfg.stop_seconds = run_seconds;
    WorkloadSpec flood;
    flood.kind = WorkloadKind::SpoofedSynFlood;
    flood.rate_mbps = mbps;
    cfg.workloads.push_back(flood);
    return cfg;
}

ExperimentConfig port_exhaustion_config(Policy policy, std::uint64_t max_conns,
                                        std::uint32_t pool, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.policy = policy;
    cfg.buffer_bytes = 1ull << 23;  // ports, not the buffer, are the scarce resource here
    cfg.service_rate = 20000;
    cfg.flow_table_capacity = 300000;
    cfg.seed = seed;
    cfg.stop_seconds = 120;
    WorkloadSpec attack;
    attack.kind = WorkloadKind::PortExhaustion;
    attack.rate_mbps = 5.0;
    attack.src_pool = pool;
    attack.max_conns = max_conns;
    cfg.workloads.push_back(attack);
    return cfg;
}

ExperimentConfig retrieval_config(Policy policy, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.policy = policy;
    cfg.seed = seed;
    cfg.stop_seconds = 120;
    WorkloadSpec client;
    client.kind = WorkloadKind::LegitClient;
    client.max_conns = 30;
    client.client_timeout = seconds(3.0);
    cfg.workloads.push_back(client);
    WorkloadSpec flood;
    flood.kind = WorkloadKind::SpoofedSynFlood;
    flood.rate_mbps = 6.5;
    cfg.workloads.push_back(flood);
    return cfg;
}

ExperimentConfig overhead_config(Policy policy, bool under_attack, std::uint32_t pages,
                                 std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.policy = policy;
    cfg.p_proxy = 0.05;
    cfg.trials = 10;
    cfg.seed = seed;
    cfg.rtt_ms = 20;
    cfg.bandwidth_mbps = 100;
    cfg.proxy_op_delay_ms = 8.5;
    // generous bound past the worst-case transaction window
    cfg.stop_seconds = pages * 0.6 + 60.0;
    WorkloadSpec client;
    client.kind = WorkloadKind::LegitClient;
    client.max_conns = pages;
    cfg.workloads.push_back(client);
    if (under_attack) {
        WorkloadSpec flood;
        flood.kind = WorkloadKind::SpoofedSynFlood;
        flood.rate_mbps = 6.5;
        flood.stop = seconds(cfg.stop_seconds);
        cfg.workloads.push_back(flood);
    }
    return cfg;
}

ExperimentConfig reduction_config(Policy policy, const std::string& trace, std::uint64_t seed) {
    ExperimentConfig cfg;
    cfg.policy = policy;
    cfg.p_proxy = 1.0;
    cfg.blacklist_enabled = false;
    cfg.seed = seed;
    cfg.rtt_ms = 4;
    cfg.bandwidth_mbps = 100;
    cfg.proxy_op_delay_ms = 2;
    cfg.stop_seconds = 60;
    cfg.trace_path = trace;
    WorkloadSpec client;
    client.kind = WorkloadKind::LegitClient;
    client.max_conns = 20;
    client.think_time = seconds(0.05);
    cfg.workloads.push_back(client);
    WorkloadSpec attack;
    attack.kind = WorkloadKind::BufferSaturation;
    attack.rate_mbps = 0.1;
    attack.max_conns = 300;
    attack.stop = seconds(10.0);
    cfg.workloads.push_back(attack);
    return cfg;
}

// ---- criteria ----

// Buffer saturation anchor: 2^22 bytes, 72-byte entries, 1 Mbps -> 780 conn/s
// saturates in 74.718 s +/- 5% (mean over 5 seeded trials).
bool c1_buffer_saturation_anchor(std::string& detail) {
    ExperimentConfig cfg = buffer_sat_config(1ull << 22, Policy::AvantGuard, 0, 1.0, 5, 42);
    auto reports = run_experiment(cfg, 2);
    const double mean = mean_saturation_time(reports);
    const bool ok = reports.size() == 5 && mean > 0 && within_rel(mean, 74.718, 0.05);
    detail = fmt("mean saturation %.3f s over %zu trials, target 74.718 s +/- 5%%", mean,
                 reports.size());
    return ok;
}

// Linear buffer scaling: time at 2^22 is 4.0x the time at 2^20, +/- 5%, for
// rates 1, 2 and 5 Mbps.
bool c2_linear_buffer_scaling(std::string& detail) {
    bool ok = true;
    std::string parts;
    std::uint64_t seed = 200;
    for (double rate : {1.0, 2.0, 5.0}) {
        auto small = run_experiment(
            buffer_sat_config(1ull << 20, Policy::AvantGuard, 0, rate, 3, seed++), 2);
        auto large = run_experiment(
            buffer_sat_config(1ull << 22, Policy::AvantGuard, 0, rate, 3, seed++), 2);
        const double ratio = mean_saturation_time(large) / mean_saturation_time(small);
        ok = ok && within_rel(ratio, 4.0, 0.05);
        parts += fmt(" %gMbps:%.4fx", rate, ratio);
    }
    detail = fmt("t(2^22)/t(2^20) =%s, target 4.0 +/- 5%%", parts.c_str());
    return ok;
}

// Inverse-rate scaling: doubling the attack bandwidth halves the saturation
// time, +/- 5%, at both buffer sizes.
bool c3_inverse_rate_scaling(std::string& detail) {
    bool ok = true;
    std::string parts;
    std::uint64_t seed = 300;
    for (std::uint64_t buffer : {1ull << 20, 1ull << 22}) {
        for (double rate : {1.0, 2.0}) {
            auto slow = run_experiment(
                buffer_sat_config(buffer, Policy::AvantGuard, 0, rate, 3, seed++), 2);
            auto fast = run_experiment(
                buffer_sat_config(buffer, Policy::AvantGuard, 0, 2 * rate, 3, seed++), 2);
            const double ratio = mean_saturation_time(slow) / mean_saturation_time(fast);
            ok = ok && within_rel(ratio, 2.0, 0.05);
            parts += fmt(" 2^%d@%g->%gMbps:%.4fx", buffer == (1ull << 20) ? 20 : 22, rate,
                         2 * rate, ratio);
        }
    }
    detail = fmt("halving ratios:%s, target 2.0 +/- 5%%", parts.c_str());
    return ok;
}

// LineSwitch resilience: p=0.05 mean saturation time over >= 20 trials lands
// at 10x..25x the avantguard time (naive 1/p model says 20x; the original
// measurements report 769.487/74.718 ~= 10.3x). p=0.01 must beat p=0.05.
bool c4_lineswitch_resilience(std::string& detail) {
    auto ag = run_experiment(buffer_sat_config(1ull << 22, Policy::AvantGuard, 0, 1.0, 5, 42), 2);
    const double ag_mean = mean_saturation_time(ag);

    auto ls05 = run_experiment(
        buffer_sat_config(1ull << 22, Policy::LineSwitch, 0.05, 1.0, 20, 4500), 2);
    const double ls05_mean = mean_saturation_time(ls05);
    const double ratio05 = ls05_mean / ag_mean;

    auto ls01 = run_experiment(
        buffer_sat_config(1ull << 22, Policy::LineSwitch, 0.01, 1.0, 3, 4600), 2);
    const double ls01_mean = mean_saturation_time(ls01);
    const double ratio01 = ls01_mean / ag_mean;

    std::uint64_t sat05 = 0;
    for (const auto& r : ls05) sat05 += r.saturation_time.has_value() ? 1 : 0;

    const bool ok = sat05 == ls05.size() && ratio05 >= 10.0 && ratio05 <= 25.0 &&
                    ratio01 > ratio05;
    detail = fmt(
        "p=0.05: %.1f s vs avantguard %.2f s = %.2fx (accept [10,25]; naive 1/p model 20.0x, "
        "reference measurements 10.3x); p=0.01: %.2fx > p=0.05 ratio: %s",
        ls05_mean, ag_mean, ratio05, ratio01, ratio01 > ratio05 ? "yes" : "no");
    return ok;
}

// Spoofed-flood shielding: defenses keep packet-ins and translation entries
// at exactly zero at any rate; vanilla saturates the controller within the
// closed-form time +/- one service quantum.
bool c5_spoofed_shielding(std::string& detail) {
    bool ok = true;
    std::string parts;

    for (double mbps : {2.0, 6.5}) {
        auto vanilla = run_experiment(spoofed_config(Policy::Vanilla, mbps, 30.0, 500));
        const auto& r = vanilla[0];
        const double closed = 10000.0 / (spoofed_syn_rate(mbps) - 2000.0);
        const double quantum = 1.0 / 2000.0;
        const bool sat_ok = r.saturation_time.has_value() && r.controller_drops > 0 &&
                            std::abs(*r.saturation_time - closed) <= quantum;
        ok = ok && sat_ok;
        parts += fmt(" vanilla@%g: %.4f s (oracle %.4f +/- %.4f)", mbps,
                     r.saturation_time.value_or(-1), closed, quantum);
    }

    for (Policy p : {Policy::AvantGuard, Policy::LineSwitch}) {
        for (double mbps : {2.0, 6.5}) {
            auto def = run_experiment(spoofed_config(p, mbps, 8.0, 501));
            const auto& r = def[0];
            const bool shielded = r.packet_ins == 0 && r.peak_translation_entries == 0 &&
                                  r.controller_drops == 0;
            ok = ok && shielded;
            parts += fmt(" %s@%g: pkt_ins=%llu entries=%llu", policy_name(p).c_str(), mbps,
                         static_cast<unsigned long long>(r.packet_ins),
                         static_cast<unsigned long long>(r.peak_translation_entries));
        }
    }
    detail = parts.substr(1);
    return ok;
}

// Port exhaustion: with one switch address the 64513th concurrent migration
// fails; under lineswitch p=0.05 the proxied count over 64512 attempts from
// one completed source obeys the binomial expectation within 3 sigma.
bool c6_port_exhaustion(std::string& detail) {
    auto ag = run_experiment(port_exhaustion_config(Policy::AvantGuard, 64612, 2, 600));
    const auto& ra = ag[0];
    const bool ag_ok = ra.ports_exhausted == 100 && ra.live_migration_conns == 64512 &&
                       ra.admitted_conns == 64612;

    ExperimentConfig ls_cfg = port_exhaustion_config(Policy::LineSwitch, 64512, 1, 601);
    ls_cfg.p_proxy = 0.05;
    auto ls = run_experiment(ls_cfg);
    const auto& rl = ls[0];
    const double n = 64512;
    const double expect = 1.0 + (n - 1) * 0.05;
    const double sigma3 = 3.0 * std::sqrt((n - 1) * 0.05 * 0.95);
    const bool ls_ok = std::abs(double(rl.syn_proxied) - expect) <= sigma3 &&
                       rl.ports_exhausted == 0;

    detail = fmt(
        "avantguard: 64512 live, refusals at capacity = %llu (expect 100); lineswitch proxied "
        "%llu of 64512 attempts (expect %.1f +/- %.1f)",
        static_cast<unsigned long long>(ra.ports_exhausted),
        static_cast<unsigned long long>(rl.syn_proxied), expect, sigma3);
    return ag_ok && ls_ok;
}

// Retrieval success under a 6.5 Mbps spoofed flood: both defenses serve every
// page (rate exactly 1.0); vanilla loses pages.
bool c7_retrieval_under_attack(std::string& detail) {
    auto ag = run_experiment(retrieval_config(Policy::AvantGuard, 700));
    auto ls = run_experiment(retrieval_config(Policy::LineSwitch, 701));
    auto vn = run_experiment(retrieval_config(Policy::Vanilla, 702));

    const double ag_rate = ag[0].retrieval_success_rate.value_or(0);
    const double ls_rate = ls[0].retrieval_success_rate.value_or(0);
    const double vn_rate = vn[0].retrieval_success_rate.value_or(1);

    const bool ok = ag_rate == 1.0 && ls_rate == 1.0 && vn_rate < 1.0 &&
                    ag[0].pages_completed >= 20 && ls[0].pages_completed >= 20;
    detail = fmt("success avantguard %.4f, lineswitch %.4f (both must be exactly 1.0), "
                 "vanilla %.4f (< 1.0); pages: %llu/%llu/%llu",
                 ag_rate, ls_rate, vn_rate,
                 static_cast<unsigned long long>(ag[0].pages_completed),
                 static_cast<unsigned long long>(ls[0].pages_completed),
                 static_cast<unsigned long long>(vn[0].pages_completed));
    return ok;
}

// Overhead ordering: avantguard > lineswitch > 0 in both scenarios, and the
// lineswitch overhead converges to p_proxy times the avantguard one (+/-30%).
// The reference percentages (41.83/7.67 no attack, 36.92/5.45 under attack)
// are calibration targets, not assertions.
bool c8_overhead_ordering(std::string& detail) {
    auto baseline = run_experiment(overhead_config(Policy::Vanilla, false, 2000, 800), 2);

    auto ag_no = run_experiment(overhead_config(Policy::AvantGuard, false, 2000, 801), 2);
    auto ls_no = run_experiment(overhead_config(Policy::LineSwitch, false, 2000, 802), 2);
    auto ag_at = run_experiment(overhead_config(Policy::AvantGuard, true, 400, 803), 2);
    auto ls_at = run_experiment(overhead_config(Policy::LineSwitch, true, 400, 804), 2);

    const double oh_ag_no = overhead_report(baseline, ag_no);
    const double oh_ls_no = overhead_report(baseline, ls_no);
    const double oh_ag_at = overhead_report(baseline, ag_at);
    const double oh_ls_at = overhead_report(baseline, ls_at);

    const double conv_no = oh_ls_no / (0.05 * oh_ag_no);
    const double conv_at = oh_ls_at / (0.05 * oh_ag_at);

    const bool ok = oh_ag_no > oh_ls_no && oh_ls_no > 0 && oh_ag_at > oh_ls_at && oh_ls_at > 0 &&
                    std::abs(conv_no - 1.0) <= 0.30 && std::abs(conv_at - 1.0) <= 0.30;
    detail = fmt(
        "no attack: avantguard %.2f%% > lineswitch %.2f%% > 0 (calibration targets 41.83/7.67); "
        "under attack: %.2f%% > %.2f%% > 0 (targets 36.92/5.45); lineswitch/(p*avantguard) = "
        "%.3f and %.3f (accept 1 +/- 0.30)",
        oh_ag_no, oh_ls_no, oh_ag_at, oh_ls_at, conv_no, conv_at);
    return ok;
}

// Cookie property suite plus statelessness under a million spoofed SYNs.
bool c9_cookie_suite(std::string& detail) {
    CookieKey key;
    key.secret_hi = 0xabcdef0123456789ULL;
    key.secret_lo = 0x13579bdf02468aceULL;
    Rng rng(900, 0);

    auto random_flow = [&rng] {
        FlowKey f;
        f.src_ip = IpAddress{rng.next_u32()};
        f.dst_ip = IpAddress{rng.next_u32()};
        f.src_port = static_cast<std::uint16_t>(rng.below(65536));
        f.dst_port = static_cast<std::uint16_t>(rng.below(65536));
        return f;
    };

    bool round_trip = true, expiry = true;
    int collisions = 0;
    for (int i = 0; i < 1000; ++i) {
        const FlowKey a = random_flow();
        FlowKey b = random_flow();
        if (b == a) b.src_port ^= 1;
        const SimTime t = rng.below(1000) * kUsPerSecond;
        const std::uint32_t isn = issue_cookie(key, a, t);
        if (issue_cookie(key, b, t) == isn) ++collisions;
        round_trip = round_trip && validate_cookie(key, a, isn, t + rng.below(64 * kUsPerSecond));
        expiry = expiry && !validate_cookie(key, a, isn, t + 3 * 64 * kUsPerSecond);
    }

    ExperimentConfig cfg = spoofed_config(Policy::AvantGuard, 0, 5.1, 901);
    cfg.workloads[0].rate_cps = 200000;
    cfg.workloads[0].stop = seconds(5.0);
    auto reports = run_experiment(cfg);
    const auto& r = reports[0];
    const bool stateless = r.syn_proxied == 1000000 && r.packet_ins == 0 &&
                           r.peak_translation_entries == 0 && r.live_migration_conns == 0;

    detail = fmt("round-trip %s, 2-epoch expiry %s, %d collisions in 1000 pairs, 10^6-SYN flood: "
                 "proxied %llu, packet-ins %llu, peak entries %llu, live state %llu",
                 round_trip ? "ok" : "FAIL", expiry ? "ok" : "FAIL", collisions,
                 static_cast<unsigned long long>(r.syn_proxied),
                 static_cast<unsigned long long>(r.packet_ins),
                 static_cast<unsigned long long>(r.peak_translation_entries),
                 static_cast<unsigned long long>(r.live_migration_conns));
    return round_trip && expiry && collisions == 0 && stateless;
}

// Reduction: lineswitch with p=1 and blacklisting off produces a wire trace
// byte-identical to avantguard on the same seeded workload.
bool c10_reduction(std::string& detail) {
    const std::string trace_ag = "/tmp/sdnsim_acc_c10_ag.log";
    const std::string trace_ls = "/tmp/sdnsim_acc_c10_ls.log";
    ExperimentConfig ag = reduction_config(Policy::AvantGuard, trace_ag, 1000);
    ExperimentConfig ls = reduction_config(Policy::LineSwitch, trace_ls, 1000);

    auto ra = run_experiment(ag);
    auto rl = run_experiment(ls);

    const std::string a = read_file(trace_ag);
    const std::string l = read_file(trace_ls);
    std::remove(trace_ag.c_str());
    std::remove(trace_ls.c_str());

    const bool traces_match = !a.empty() && a == l;
    const bool reports_match = ra[0].packet_ins == rl[0].packet_ins &&
                               ra[0].peak_translation_entries == rl[0].peak_translation_entries &&
                               ra[0].pages_completed == rl[0].pages_completed &&
                               ra[0].admitted_conns == rl[0].admitted_conns;
    detail = fmt("trace %zu bytes, byte-identical: %s; report fields match: %s (%llu packet-ins, "
                 "%llu admitted)",
                 a.size(), traces_match ? "yes" : "NO", reports_match ? "yes" : "NO",
                 static_cast<unsigned long long>(ra[0].packet_ins),
                 static_cast<unsigned long long>(ra[0].admitted_conns));
    return traces_match && reports_match;
}

// Determinism: re-running each scenario family with its seed reproduces the
// CSV byte for byte.
bool c11_determinism(std::string& detail) {
    std::vector<std::pair<std::string, ExperimentConfig>> cases;
    cases.emplace_back("buffer_sat_avantguard",
                       buffer_sat_config(1ull << 22, Policy::AvantGuard, 0, 1.0, 2, 42));
    cases.emplace_back("buffer_sat_lineswitch",
                       buffer_sat_config(1ull << 18, Policy::LineSwitch, 0.05, 1.0, 2, 1100));
    cases.emplace_back("spoofed_vanilla", spoofed_config(Policy::Vanilla, 2.0, 10.0, 1101));
    cases.emplace_back("retrieval_lineswitch", retrieval_config(Policy::LineSwitch, 1102));
    {
        ExperimentConfig oh = overhead_config(Policy::AvantGuard, false, 200, 1103);
        oh.trials = 2;
        cases.emplace_back("overhead_avantguard", oh);
    }
    {
        ExperimentConfig pe = port_exhaustion_config(Policy::LineSwitch, 20000, 1, 1104);
        pe.p_proxy = 0.05;
        cases.emplace_back("ports_lineswitch", pe);
    }

    bool ok = true;
    std::string parts;
    for (auto& [name, cfg] : cases) {
        // round-trip through the config file format, then run twice
        const ExperimentConfig parsed = parse_config_string(serialize_config(cfg));
        const std::string first = csv_of(parsed, run_experiment(parsed, 2));
        const std::string second = csv_of(parsed, run_experiment(parsed, 2));
        const bool same = first == second && !first.empty();
        ok = ok && same;
        parts += fmt(" %s:%s", name.c_str(), same ? "ok" : "DIFFERS");
    }
    detail = parts.substr(1);
    return ok;
}

struct Criterion {
    int id;
    const char* name;
    std::function<bool(std::string&)> run;
};

std::vector<Criterion> criteria() {
    return {
        {1, "buffer saturation anchor (74.718 s +/- 5%)", c1_buffer_saturation_anchor},
        {2, "linear buffer scaling (4.0x +/- 5%)", c2_linear_buffer_scaling},
        {3, "inverse-rate scaling (2.0x +/- 5%)", c3_inverse_rate_scaling},
        {4, "lineswitch resilience ratio (10x..25x)", c4_lineswitch_resilience},
        {5, "spoofed-flood shielding + vanilla queueing oracle", c5_spoofed_shielding},
        {6, "port exhaustion at 64512 + binomial proxy count", c6_port_exhaustion},
        {7, "retrieval success under attack (1.0 exact)", c7_retrieval_under_attack},
        {8, "overhead ordering and p-proportionality", c8_overhead_ordering},
        {9, "syn-cookie property suite + statelessness", c9_cookie_suite},
        {10, "reduction: lineswitch(p=1) == avantguard", c10_reduction},
        {11, "determinism: byte-identical CSV on rerun", c11_determinism},
    };
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> wanted;
    for (int i = 1; i < argc; ++i) wanted.push_back(std::atoi(argv[i]));

    int failures = 0;
    for (const Criterion& c : criteria()) {
        if (!wanted.empty() && std::find(wanted.begin(), wanted.end(), c.id) == wanted.end()) {
            continue;
        }
        std::string detail;
        bool ok = false;
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        std::printf("[%s] C%02d %s: %s\n", ok ? "PASS" : "FAIL", c.id, c.name, detail.c_str());
        std::fflush(stdout);
        if (!ok) ++failures;
    }
    return failures == 0 ? 0 : 1;
}
