#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdnsim/sim_engine.hpp"

namespace sdnsim {

struct ConfigError : std::runtime_error {
    ConfigError(const std::string& field_, const std::string& msg)
        : std::runtime_error("config field '" + field_ + "': " + msg), field(field_) {}
    std::string field;
};

struct ExperimentConfig {
    Policy policy = Policy::Vanilla;
    bool delayed_migration = false;
    std::uint64_t buffer_bytes = 1ull << 22;
    std::uint32_t entry_bytes = 72;
    double p_proxy = 0.05;
    double t_base_s = 5.0;
    bool blacklist_enabled = true;
    bool blacklist_first_penalty_doubles = false;
    double handshake_timeout_s = 3.0;
    double idle_horizon_s = 60.0;
    double gc_interval_s = 5.0;
    std::uint32_t switch_addresses = 1;
    std::size_t flow_table_capacity = 100000;
    double service_rate = 2000.0;
    std::size_t queue_capacity = 10000;
    double saturation_latency_s = 0;  // 0: only drops count as controller saturation
    double rtt_ms = 0;
    double bandwidth_mbps = 0;  // 0 = infinite
    double ctrl_rtt_ms = 0;
    double proxy_op_delay_ms = 0;
    std::vector<WorkloadSpec> workloads;
    std::uint32_t trials = 1;
    std::uint64_t seed = 1;
    double stop_seconds = 0;  // 0 = unbounded
    StopPredicate stop_predicate = StopPredicate::None;
    std::string output_path;
    std::string trace_path;

    void validate() const;  // throws ConfigError naming the offending field
};

// flat key = value text; workloads follow in repeated [workload] sections
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_string(const std::string& text);
std::string serialize_config(const ExperimentConfig& cfg);

SimConfig to_sim_config(const ExperimentConfig& cfg, std::uint32_t trial);
StopSpec to_stop_spec(const ExperimentConfig& cfg);

// One report per trial; trial i runs with seed + i. jobs > 1 runs trials on
// that many threads with identical results. With `errors` given, a failing
// trial is recorded there and the remaining trials still run (their reports
// are the partial result set); without it the first failure propagates.
std::vector<SimulationReport> run_experiment(const ExperimentConfig& cfg, unsigned jobs = 1,
                                             std::vector<std::string>* errors = nullptr);

// 100 * (mean page latency of treatment / mean of baseline - 1)
double overhead_report(const std::vector<SimulationReport>& baseline,
                       const std::vector<SimulationReport>& treatment);

double mean_latency(const std::vector<SimulationReport>& reports);
double mean_saturation_time(const std::vector<SimulationReport>& reports);

struct PresetBatch {
    std::string name;
    std::vector<ExperimentConfig> configs;
};

// canned sweeps: fig3a (2^20 buffer), fig3b (2^22), overhead_noattack,
// overhead_attack (6.5 Mbps spoofed flood next to the legitimate client)
PresetBatch preset(const std::string& name);

// one buffer-saturation scenario: attacker source pool, stop condition and
// flow-table headroom are sized from the expected run length
ExperimentConfig buffer_sat_config(std::uint64_t buffer_bytes, Policy policy, double p_proxy,
                                   double rate_mbps, std::uint32_t trials, std::uint64_t seed);

// back-solves the per-entry byte cost from a target saturation time
double calibrate_entry_bytes(std::uint64_t buffer_bytes, double conn_rate, double target_seconds);

// header row, one row per completed trial, then mean/stddev summary rows
void write_csv(std::ostream& os, const ExperimentConfig& cfg,
               const std::vector<SimulationReport>& reports);

std::string policy_name(Policy p);
std::string workload_kind_name(WorkloadKind k);

}  // namespace sdnsim
