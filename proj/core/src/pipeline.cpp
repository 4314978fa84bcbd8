#include "speed/pipeline.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <numeric>

#include "speed/parallel.hpp"

namespace speed {

std::string_view to_string(Stage stage) noexcept {
    switch (stage) {
        case Stage::WB:
            return "WB";
        case Stage::AD:
            return "AD";
        case Stage::CN:
            return "CN";
        case Stage::FHH:
            return "FHH";
        case Stage::MB:
            return "MB";
        case Stage::GB:
            return "GB";
        case Stage::CB:
            return "CB";
    }
    return "?";
}

Stage parse_stage(std::string_view text) {
    std::string upper(text);
    std::transform(upper.begin(), upper.end(), upper.begin(), [](unsigned char c) { return std::toupper(c); });
    for (Stage s : kAllStages) {
        if (to_string(s) == upper) {
            return s;
        }
    }
    throw ConfigError("unknown stage identifier '" + std::string(text) + "'");
}

std::vector<Stage> parse_stage_list(std::string_view text) {
    std::vector<Stage> out;
    std::string token;
    const auto flush = [&] {
        if (!token.empty()) {
            out.push_back(parse_stage(token));
            token.clear();
        }
    };
    for (char c : text) {
        if (c == '-' || c == ',') {
            flush();
        } else if (!std::isspace(static_cast<unsigned char>(c))) {
            token.push_back(c);
        }
    }
    flush();
    return out;
}

std::string format_stage_list(const std::vector<Stage>& stages, char separator) {
    std::string out;
    for (std::size_t i = 0; i < stages.size(); ++i) {
        if (i > 0) {
            out.push_back(separator);
        }
        out += to_string(stages[i]);
    }
    return out;
}

const std::vector<Stage>& canonical_order() {
    static const std::vector<Stage> order(std::begin(kAllStages), std::end(kAllStages));
    return order;
}

bool is_conditional(Stage stage) noexcept { return stage == Stage::CN || stage == Stage::CB; }

std::vector<Stage> PipelineConfig::enabled_stages() const {
    std::vector<Stage> out;
    for (Stage s : stage_order) {
        if (!disabled_stages.contains(s)) {
            out.push_back(s);
        }
    }
    return out;
}

bool PipelineConfig::is_forced(Stage stage) const noexcept {
    return is_conditional(stage) && (force_conditionals || forced_stages.contains(stage));
}

PipelineConfig raw_canny_config(const PipelineConfig& base) {
    PipelineConfig cfg = base;
    cfg.disabled_stages.insert(std::begin(kAllStages), std::end(kAllStages));
    return cfg;
}

void validate(const PipelineConfig& config) {
    std::set<Stage> seen;
    for (std::size_t i = 0; i < config.stage_order.size(); ++i) {
        const Stage s = config.stage_order[i];
        if (!seen.insert(s).second) {
            throw ConfigError("stage " + std::string(to_string(s)) + " appears more than once");
        }
        if (s == Stage::WB && i != 0) {
            throw ConfigError("WB must be the first stage");
        }
    }
    for (Stage s : config.forced_stages) {
        if (!is_conditional(s)) {
            throw ConfigError("only conditional stages (CN, CB) can be forced, not " + std::string(to_string(s)));
        }
    }
    validate(config.diffusion);
    validate(config.triggers);
    validate(config.gaussian);
    validate(config.canny);
    if (config.fhh_levels < 2) {
        throw ConfigError("fhh_levels must be at least 2");
    }
}

const StageTrace* PipelineTrace::find(std::string_view stage) const noexcept {
    for (const auto& s : stages) {
        if (s.stage == stage) {
            return &s;
        }
    }
    return nullptr;
}

namespace {

using Clock = std::chrono::steady_clock;

StageTrace make_trace(std::string_view stage) {
    StageTrace t;
    t.stage = std::string(stage);
    return t;
}

double elapsed_ms(Clock::time_point start) {
    return std::chrono::duration<double, std::milli>(Clock::now() - start).count();
}

GrayRaster apply_gray_stage(Stage stage, const GrayRaster& img, const PipelineConfig& cfg, StageTrace& entry) {
    switch (stage) {
        case Stage::AD:
            entry.diffusion_k = resolve_diffusion_k(img, cfg.diffusion);
            return anisotropic_diffusion(img, cfg.diffusion);
        case Stage::CN: {
            auto r = conditional_contrast_normalization(img, cfg.triggers, cfg.is_forced(Stage::CN));
            entry.applied = r.applied;
            entry.skew_ratio = r.skew.ratio;
            return std::move(r.image);
        }
        case Stage::FHH:
            return fuzzy_histogram_hyperbolization(img, cfg.fhh_levels);
        case Stage::MB:
            return median_blur(img);
        case Stage::GB:
            return gaussian_blur(img, cfg.gaussian);
        case Stage::CB: {
            auto r = conditional_gaussian_blur(img, cfg.triggers, cfg.gaussian, cfg.is_forced(Stage::CB));
            entry.applied = r.applied;
            entry.sparse_fraction = r.sparse.sparse_fraction;
            return std::move(r.image);
        }
        case Stage::WB:
            break;
    }
    throw ConfigError("WB must be the first stage");
}

}  // namespace

PipelineResult run_pipeline(const ColorRaster& img, const PipelineConfig& config) {
    validate(config);
    const auto pipeline_start = Clock::now();
    PipelineResult result;
    const std::vector<Stage> stages = config.enabled_stages();

    std::size_t next = 0;
    GrayRaster gray;
    if (!stages.empty() && stages.front() == Stage::WB) {
        StageTrace entry = make_trace(to_string(Stage::WB));
        entry.input_checksum = checksum(img);
        const auto start = Clock::now();
        WhiteBalanceResult wb = white_balance(img);
        // Grayscale conversion always follows white balance directly.
        gray = to_grayscale(wb.image);
        entry.milliseconds = elapsed_ms(start);
        entry.degenerate = wb.degenerate;
        entry.output_checksum = checksum(gray);
        result.trace.stages.push_back(std::move(entry));
        next = 1;
    } else {
        gray = to_grayscale(img);
    }

    for (; next < stages.size(); ++next) {
        const Stage stage = stages[next];
        StageTrace entry = make_trace(to_string(stage));
        entry.input_checksum = checksum(gray);
        const auto start = Clock::now();
        try {
            gray = apply_gray_stage(stage, gray, config, entry);
        } catch (const StageError&) {
            throw;
        } catch (const std::exception& e) {
            throw StageError(entry.stage, e.what());
        }
        entry.milliseconds = elapsed_ms(start);
        entry.output_checksum = checksum(gray);
        result.trace.stages.push_back(std::move(entry));
    }

    StageTrace detector = make_trace("Canny");
    detector.input_checksum = checksum(gray);
    const auto start = Clock::now();
    try {
        CannyResult c = canny(gray, config.canny);
        result.edges = std::move(c.edges);
        detector.canny_thresholds = c.thresholds;
    } catch (const std::exception& e) {
        throw StageError(detector.stage, e.what());
    }
    detector.milliseconds = elapsed_ms(start);
    detector.output_checksum = checksum(result.edges);
    result.trace.stages.push_back(std::move(detector));
    result.trace.total_milliseconds = elapsed_ms(pipeline_start);
    return result;
}

CorpusRun evaluate_pipeline(const std::vector<CorpusItem>& corpus, const PipelineConfig& config,
                            const ExecutionOptions& options) {
    validate(config);
    validate(options.ssim);
    std::vector<ImageOutcome> outcomes(corpus.size());
    parallel_for(corpus.size(), options.workers, [&](std::size_t i) {
        const CorpusItem& item = corpus[i];
        ImageOutcome& out = outcomes[i];
        out.id = item.id;
        try {
            PipelineResult r = run_pipeline(item.image, config);
            out.trace = std::move(r.trace);
            if (count_ones(item.ground_truth) == 0) {
                out.error = "empty ground truth";
                return;
            }
            out.scores = score_image(r.edges, item.ground_truth, options.ssim);
        } catch (const std::exception& e) {
            out.error = e.what();
        }
    });
    std::stable_sort(outcomes.begin(), outcomes.end(),
                     [](const ImageOutcome& a, const ImageOutcome& b) { return a.id < b.id; });

    CorpusRun run;
    std::vector<ScorePair> scores;
    for (const auto& o : outcomes) {
        if (o.scores) {
            scores.push_back(*o.scores);
        } else {
            ++run.summary.skipped;
        }
    }
    if (scores.empty()) {
        throw UndefinedScoreError("no image in the corpus could be scored");
    }
    run.summary.mean = mean_scores(scores);
    run.summary.scored = scores.size();
    run.images = std::move(outcomes);
    return run;
}

ScorePair run_ablation(const std::vector<CorpusItem>& corpus, const PipelineConfig& base, Stage stage,
                       const ExecutionOptions& options) {
    if (std::find(base.stage_order.begin(), base.stage_order.end(), stage) == base.stage_order.end()) {
        throw ConfigError("stage " + std::string(to_string(stage)) + " is not part of the base order");
    }
    PipelineConfig cfg = base;
    cfg.disabled_stages.insert(stage);
    return evaluate_pipeline(corpus, cfg, options).summary.mean;
}

std::vector<OrderRow> run_order_study(const std::vector<CorpusItem>& corpus, const PipelineConfig& base,
                                      const std::vector<std::vector<Stage>>& orders, const ExecutionOptions& options) {
    for (const auto& order : orders) {
        if (order.empty() || order.front() != Stage::WB) {
            throw ConfigError("order " + format_stage_list(order) + " must start with WB");
        }
        PipelineConfig probe = base;
        probe.stage_order = order;
        validate(probe);
    }
    std::vector<OrderRow> rows;
    rows.reserve(orders.size());
    for (const auto& order : orders) {
        PipelineConfig cfg = base;
        cfg.stage_order = order;
        rows.push_back({order, evaluate_pipeline(corpus, cfg, options).summary.mean});
    }
    return rows;
}

const std::vector<std::vector<Stage>>& reference_orders() {
    static const std::vector<std::vector<Stage>> orders = {
        parse_stage_list("WB-AD-CN-FHH-MB-GB-CB"), parse_stage_list("WB-AD-MB-GB-CB-FHH-CN"),
        parse_stage_list("WB-CN-FHH-GB-CB-MB-AD"), parse_stage_list("WB-FHH-AD-MB-GB-CB-CN"),
        parse_stage_list("WB-MB-GB-CB-CN-FHH-AD"),
    };
    return orders;
}

}  // namespace speed
