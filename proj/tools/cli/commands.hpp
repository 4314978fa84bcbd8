#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "speed/pipeline.hpp"
#include "speed/settings.hpp"

namespace speed::cli {

enum class Mode { detect, evaluate, ablate, order_study, bench };

std::string_view to_string(Mode mode) noexcept;
Mode parse_mode(std::string_view text);

enum ExitCode : int { kSuccess = 0, kPartialFailure = 1, kInvalidInvocation = 2 };

struct RunManifest {
    std::filesystem::path input_dir;
    std::optional<std::filesystem::path> annotation_dir;
    std::filesystem::path output_dir = "speed_out";
    std::optional<std::filesystem::path> config_path;
    Mode mode = Mode::detect;
    int workers = 1;
    bool force_conditionals = false;
    std::vector<Stage> disabled;
    std::optional<std::filesystem::path> orders_file;
    // Bench mode only.
    std::vector<int> bench_sizes = {512, 1024, 2048};
    int bench_runs = 5;
    double memory_budget_mb = 4096.0;
};

// Throws ConfigError when an invariant is broken (missing input directory,
// missing annotations for scoring modes).
void validate(const RunManifest& manifest);

// Config file (if any) with the manifest's overrides applied.
Settings resolve_settings(const RunManifest& manifest);

// Sorted supported image files directly inside `dir`.
std::vector<std::filesystem::path> list_images(const std::filesystem::path& dir);

// Per-image CSV shared by detect and evaluate: image_path, tp, fp,
// <stage>_applied..., <stage>_ms..., canny_ms, total_ms, error.
std::string csv_header();
std::string csv_row(const std::string& image_path, const std::optional<ScorePair>& scores,
                    const PipelineTrace* trace, const std::string& error);

// Red edges over the source image.
ColorRaster overlay_edges(const ColorRaster& image, const EdgeMap& edges);

// Each command writes its reports under manifest.output_dir and returns an exit code.
int cmd_detect(const RunManifest& manifest);
// Raw Canny against the configured pipeline on an annotated corpus.
int cmd_compare(const RunManifest& manifest);
int cmd_ablate(const RunManifest& manifest);
int cmd_order_study(const RunManifest& manifest);
int cmd_bench(const RunManifest& manifest);

int run(const RunManifest& manifest);

// --- bench helpers --------------------------------------------------------

ColorRaster resample_nearest(const ColorRaster& img, int width, int height);

struct BenchRow {
    int size = 0;
    std::size_t pixels = 0;
    std::optional<double> milliseconds;
    std::string status;
};

std::vector<BenchRow> run_bench(const ColorRaster& source, const PipelineConfig& config, const std::vector<int>& sizes,
                                int runs, double memory_budget_mb);

// Least-squares slope of log(ms) against log(pixels) over measured rows.
std::optional<double> loglog_slope(const std::vector<BenchRow>& rows);

// Renders a log-log time-vs-pixels chart.
ColorRaster plot_bench(const std::vector<BenchRow>& rows, int width = 480, int height = 360);

// Corpus from input_dir + annotation_dir. Unreadable images are returned in `failures`.
struct LoadedCorpus {
    std::vector<CorpusItem> items;
    std::vector<std::pair<std::string, std::string>> failures;
};

LoadedCorpus load_corpus(const std::filesystem::path& images, const std::filesystem::path& annotations,
                         const GroundTruthOptions& options);

}  // namespace speed::cli
