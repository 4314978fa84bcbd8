#include <CLI11.hpp>
#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <iostream>

#include "commands.hpp"
#include "speed/parallel.hpp"

int main(int argc, char** argv) {
    using namespace speed;
    using namespace speed::cli;

    CLI::App app{"Satellite edge-detection pre-processing pipeline"};
    RunManifest m;
    m.workers = default_worker_count();

    std::string input;
    std::string annotations;
    std::string out = m.output_dir.string();
    std::string config;
    std::string mode = "detect";
    std::string disable;
    std::string orders;
    bool verbose = false;
    bool quiet = false;

    app.add_option("--input", input, "Directory of input images")->required();
    app.add_option("--annotations", annotations, "Directory of DOTA-style label files");
    app.add_option("--out", out, "Output directory")->capture_default_str();
    app.add_option("--config", config, "YAML configuration file");
    app.add_option("--mode", mode, "detect | evaluate | ablate | order-study | bench")->capture_default_str();
    app.add_option("--workers", m.workers, "Images processed concurrently")->capture_default_str();
    app.add_flag("--force-conditionals", m.force_conditionals, "Run CN and CB regardless of their triggers");
    app.add_option("--disable", disable, "Comma-separated stages to skip, e.g. AD,FHH");
    app.add_option("--orders", orders, "File with one stage order per line (order-study)");
    app.add_option("--sizes", m.bench_sizes, "Square sizes for bench mode")->delimiter(',')->capture_default_str();
    app.add_option("--runs", m.bench_runs, "Timed runs per size in bench mode")->capture_default_str();
    app.add_option("--memory-budget-mb", m.memory_budget_mb, "Bench sizes above this estimate are skipped")
        ->capture_default_str();
    app.add_flag("-v,--verbose", verbose, "Debug logging");
    app.add_flag("-q,--quiet", quiet, "Warnings and errors only");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kSuccess : kInvalidInvocation;
    }

    auto logger = spdlog::stderr_color_mt("speed");
    spdlog::set_default_logger(logger);
    spdlog::set_pattern("[%H:%M:%S.%e] [%^%l%$] %v");
    spdlog::set_level(verbose ? spdlog::level::debug : quiet ? spdlog::level::warn : spdlog::level::info);

    try {
        m.input_dir = input;
        m.output_dir = out;
        if (!annotations.empty()) {
            m.annotation_dir = annotations;
        }
        if (!config.empty()) {
            m.config_path = config;
        }
        if (!orders.empty()) {
            m.orders_file = orders;
        }
        m.mode = parse_mode(mode);
        m.disabled = parse_stage_list(disable);
        return run(m);
    } catch (const ConfigError& e) {
        spdlog::error("{}", e.what());
        return kInvalidInvocation;
    } catch (const std::exception& e) {
        spdlog::error("{}", e.what());
        return kPartialFailure;
    }
}
