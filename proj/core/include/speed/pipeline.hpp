#pragma once

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "speed/canny.hpp"
#include "speed/eval.hpp"
#include "speed/filters.hpp"
#include "speed/raster.hpp"

namespace speed {

// Pre-processing stages, named by their usual abbreviations.
enum class Stage {
    WB,   // white balance
    AD,   // anisotropic diffusion
    CN,   // conditional contrast normalization
    FHH,  // fuzzy histogram hyperbolization
    MB,   // median blur
    GB,   // gaussian blur
    CB,   // conditional (secondary) gaussian blur
};

inline constexpr Stage kAllStages[] = {Stage::WB, Stage::AD, Stage::CN, Stage::FHH, Stage::MB, Stage::GB, Stage::CB};

std::string_view to_string(Stage stage) noexcept;
// Throws ConfigError for unknown identifiers.
Stage parse_stage(std::string_view text);
// Accepts "WB-AD-CN" or "WB,AD,CN" (whitespace ignored).
std::vector<Stage> parse_stage_list(std::string_view text);
std::string format_stage_list(const std::vector<Stage>& stages, char separator = '-');

// WB-AD-CN-FHH-MB-GB-CB.
const std::vector<Stage>& canonical_order();

bool is_conditional(Stage stage) noexcept;

struct PipelineConfig {
    std::vector<Stage> stage_order = canonical_order();
    std::set<Stage> disabled_stages;
    // Run CN and CB regardless of their triggers.
    bool force_conditionals = false;
    // Per-stage variant of force_conditionals; only CN and CB may appear.
    std::set<Stage> forced_stages;
    DiffusionParams diffusion;
    ConditionalTriggerParams triggers;
    // Shared by GB and CB.
    GaussianParams gaussian;
    CannyParams canny;
    int fhh_levels = 256;

    // stage_order minus disabled stages.
    std::vector<Stage> enabled_stages() const;
    bool is_forced(Stage stage) const noexcept;
};

// No preprocessing at all: grayscale conversion then Canny.
PipelineConfig raw_canny_config(const PipelineConfig& base = {});

void validate(const PipelineConfig& config);

struct StageTrace {
    // Stage abbreviation, or "Canny" for the detector.
    std::string stage;
    bool applied = true;
    double milliseconds = 0.0;
    std::uint64_t input_checksum = 0;
    std::uint64_t output_checksum = 0;
    std::optional<double> skew_ratio;
    std::optional<double> sparse_fraction;
    std::optional<double> diffusion_k;
    std::optional<Thresholds> canny_thresholds;
    // Set when white balance met a zero-mean channel.
    bool degenerate = false;
};

struct PipelineTrace {
    // One entry per enabled stage in execution order, then Canny.
    std::vector<StageTrace> stages;
    double total_milliseconds = 0.0;

    const StageTrace* find(std::string_view stage) const noexcept;
};

struct PipelineResult {
    EdgeMap edges;
    PipelineTrace trace;
};

// Stage failures are rethrown as StageError naming the stage.
PipelineResult run_pipeline(const ColorRaster& img, const PipelineConfig& config);

// --- corpus experiments ---------------------------------------------------

struct CorpusItem {
    std::string id;
    ColorRaster image;
    EdgeMap ground_truth;
};

struct ImageOutcome {
    std::string id;
    // Empty when the ground truth has no edges or the pipeline failed.
    std::optional<ScorePair> scores;
    PipelineTrace trace;
    std::string error;
};

struct CorpusRun {
    // Sorted by id.
    std::vector<ImageOutcome> images;
    CorpusScores summary;
};

struct ExecutionOptions {
    int workers = 1;
    SsimParams ssim;
};

// Runs the pipeline over every item and scores it. Items are evaluated
// concurrently; means are accumulated in id order so the result does not
// depend on scheduling. Throws UndefinedScoreError when nothing could be scored.
CorpusRun evaluate_pipeline(const std::vector<CorpusItem>& corpus, const PipelineConfig& config,
                            const ExecutionOptions& options = {});

// Corpus means with `stage` removed from the base configuration.
ScorePair run_ablation(const std::vector<CorpusItem>& corpus, const PipelineConfig& base, Stage stage,
                       const ExecutionOptions& options = {});

struct OrderRow {
    std::vector<Stage> order;
    ScorePair scores;
};

// Every order must start with WB and list each stage at most once.
std::vector<OrderRow> run_order_study(const std::vector<CorpusItem>& corpus, const PipelineConfig& base,
                                      const std::vector<std::vector<Stage>>& orders,
                                      const ExecutionOptions& options = {});

// Default order-study set: the canonical order first, then four permutations.
const std::vector<std::vector<Stage>>& reference_orders();

}  // namespace speed
