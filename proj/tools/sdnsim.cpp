#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "sdnsim/experiment.hpp"

namespace {

std::string default_out_dir() {
    const char* env = std::getenv("SDNSIM_OUT");
    return env != nullptr ? env : ".";
}

int run_config(const sdnsim::ExperimentConfig& cfg, const std::string& out_override,
               unsigned jobs) {
    std::vector<std::string> errors;
    auto reports = sdnsim::run_experiment(cfg, jobs, &errors);

    // completed trials are flushed even when some failed
    std::string out_path = !out_override.empty() ? out_override : cfg.output_path;
    if (out_path.empty()) {
        sdnsim::write_csv(std::cout, cfg, reports);
    } else {
        std::ofstream os(out_path, std::ios::binary);
        if (!os) {
            std::cerr << "error: cannot open output file " << out_path << "\n";
            return 1;
        }
        sdnsim::write_csv(os, cfg, reports);
        std::cerr << "wrote " << out_path << " (" << reports.size() - errors.size()
                  << " of " << reports.size() << " trials)\n";
    }
    for (const std::string& e : errors) std::cerr << "error: " << e << "\n";
    return errors.empty() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"discrete-event testbed for SDN control-plane and proxy-state saturation"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_path;
    unsigned jobs = 1;
    auto* run = app.add_subcommand("run", "run the experiment described by a config file");
    run->add_option("config", config_path, "config file (flat key = value)")->required();
    run->add_option("--out", out_path, "CSV output path (overrides the config)");
    run->add_option("--jobs", jobs, "run trials on this many threads");

    std::string preset_name;
    std::string preset_dir = default_out_dir();
    bool preset_run = false;
    unsigned preset_jobs = 1;
    auto* pre = app.add_subcommand("preset", "emit (and optionally run) a canned scenario sweep");
    pre->add_option("name", preset_name, "fig3a | fig3b | overhead_noattack | overhead_attack")
        ->required();
    pre->add_option("--out", preset_dir, "directory for config and CSV files");
    pre->add_flag("--run", preset_run, "also run every emitted config");
    pre->add_option("--jobs", preset_jobs, "trial threads when running");

    std::uint64_t cal_buffer = 1ull << 22;
    double cal_mbps = 1.0;
    double cal_cps = 0.0;
    double cal_target = 0.0;
    auto* cal = app.add_subcommand("calibrate",
                                   "back-solve entry_bytes from a target saturation time");
    cal->add_option("--buffer-bytes", cal_buffer, "translation buffer size");
    cal->add_option("--rate-mbps", cal_mbps, "attack bandwidth");
    cal->add_option("--rate-cps", cal_cps, "attack connection rate (overrides --rate-mbps)");
    cal->add_option("--target-seconds", cal_target, "observed saturation time")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            std::ifstream is(config_path);
            if (!is) {
                std::cerr << "error: cannot open config file " << config_path << "\n";
                return 1;
            }
            return run_config(sdnsim::parse_config(is), out_path, jobs);
        }
        if (*pre) {
            auto batch = sdnsim::preset(preset_name);
            int rc = 0;
            for (std::size_t i = 0; i < batch.configs.size(); ++i) {
                sdnsim::ExperimentConfig cfg = batch.configs[i];
                char suffix[64];
                std::snprintf(suffix, sizeof(suffix), "%s_%02zu_%s", batch.name.c_str(), i,
                              sdnsim::policy_name(cfg.policy).c_str());
                const std::string base = preset_dir + "/" + suffix;
                cfg.output_path = base + ".csv";
                std::ofstream os(base + ".conf", std::ios::binary);
                if (!os) {
                    std::cerr << "error: cannot write " << base << ".conf\n";
                    return 1;
                }
                os << sdnsim::serialize_config(cfg);
                os.close();
                std::cerr << "wrote " << base << ".conf\n";
                if (preset_run) rc |= run_config(cfg, "", preset_jobs);
            }
            return rc;
        }
        if (*cal) {
            const double rate = cal_cps > 0 ? cal_cps : sdnsim::bandwidth_to_conn_rate(cal_mbps);
            const double entry = sdnsim::calibrate_entry_bytes(cal_buffer, rate, cal_target);
            std::printf("entry_bytes = %.3f (nearest integer %llu)\n", entry,
                        static_cast<unsigned long long>(entry + 0.5));
            return 0;
        }
    } catch (const sdnsim::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
