#include "commands.hpp"

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>

#include "speed/image_io.hpp"
#include "speed/parallel.hpp"

namespace speed::cli {

namespace fs = std::filesystem;

std::string_view to_string(Mode mode) noexcept {
    switch (mode) {
        case Mode::detect:
            return "detect";
        case Mode::evaluate:
            return "evaluate";
        case Mode::ablate:
            return "ablate";
        case Mode::order_study:
            return "order-study";
        case Mode::bench:
            return "bench";
    }
    return "?";
}

Mode parse_mode(std::string_view text) {
    for (Mode m : {Mode::detect, Mode::evaluate, Mode::ablate, Mode::order_study, Mode::bench}) {
        if (to_string(m) == text) {
            return m;
        }
    }
    throw ConfigError("unknown mode '" + std::string(text) + "'");
}

void validate(const RunManifest& manifest) {
    if (!fs::is_directory(manifest.input_dir)) {
        throw ConfigError("input directory does not exist: " + manifest.input_dir.string());
    }
    const bool scoring =
        manifest.mode == Mode::evaluate || manifest.mode == Mode::ablate || manifest.mode == Mode::order_study;
    if (scoring) {
        if (!manifest.annotation_dir) {
            throw ConfigError(std::string(to_string(manifest.mode)) + " mode requires --annotations");
        }
        if (!fs::is_directory(*manifest.annotation_dir)) {
            throw ConfigError("annotation directory does not exist: " + manifest.annotation_dir->string());
        }
    }
    if (manifest.workers < 1) {
        throw ConfigError("--workers must be at least 1");
    }
    if (manifest.bench_runs < 1) {
        throw ConfigError("--runs must be at least 1");
    }
    for (int s : manifest.bench_sizes) {
        if (s < 3) {
            throw ConfigError("bench sizes must be at least 3");
        }
    }
}

Settings resolve_settings(const RunManifest& manifest) {
    Settings s = manifest.config_path ? load_settings(*manifest.config_path) : Settings{};
    if (manifest.force_conditionals) {
        s.pipeline.force_conditionals = true;
    }
    s.pipeline.disabled_stages.insert(manifest.disabled.begin(), manifest.disabled.end());
    validate(s.pipeline);
    return s;
}

std::vector<fs::path> list_images(const fs::path& dir) {
    std::vector<fs::path> out;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && io::is_supported_image(entry.path())) {
            out.push_back(entry.path());
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::string csv_header() {
    std::string h = "image_path,tp,fp";
    for (Stage s : kAllStages) {
        h += fmt::format(",{}_applied", to_string(s));
    }
    for (Stage s : kAllStages) {
        h += fmt::format(",{}_ms", to_string(s));
    }
    h += ",canny_ms,total_ms,error";
    return h;
}

namespace {

std::string csv_escape(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) {
        return text;
    }
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') {
            out += "\"\"";
        } else if (c == '\n') {
            out += ' ';
        } else {
            out += c;
        }
    }
    out += '"';
    return out;
}

}  // namespace

std::string csv_row(const std::string& image_path, const std::optional<ScorePair>& scores,
                    const PipelineTrace* trace, const std::string& error) {
    std::string row = csv_escape(image_path);
    row += scores ? fmt::format(",{:.6f},{:.6f}", scores->tp, scores->fp) : std::string(",,");
    for (Stage s : kAllStages) {
        const StageTrace* t = trace ? trace->find(to_string(s)) : nullptr;
        row += t ? (t->applied ? ",1" : ",0") : ",";
    }
    for (Stage s : kAllStages) {
        const StageTrace* t = trace ? trace->find(to_string(s)) : nullptr;
        row += t ? fmt::format(",{:.3f}", t->milliseconds) : std::string(",");
    }
    const StageTrace* c = trace ? trace->find("Canny") : nullptr;
    row += c ? fmt::format(",{:.3f}", c->milliseconds) : std::string(",");
    row += trace ? fmt::format(",{:.3f}", trace->total_milliseconds) : std::string(",");
    row += "," + csv_escape(error);
    return row;
}

ColorRaster overlay_edges(const ColorRaster& image, const EdgeMap& edges) {
    if (image.width() != edges.width() || image.height() != edges.height()) {
        throw DimensionMismatchError("overlay: image and edge map differ in size");
    }
    ColorRaster out = image;
    const auto e = edges.values();
    auto r = out.channel(0).values();
    auto g = out.channel(1).values();
    auto b = out.channel(2).values();
    for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i] != 0) {
            r[i] = 1.0;
            g[i] = 0.0;
            b[i] = 0.0;
        }
    }
    return out;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    out << text;
}

std::string relative_name(const fs::path& path, const fs::path& base) {
    return fs::relative(path, base).generic_string();
}

ExecutionOptions execution_options(const RunManifest& manifest, const Settings& settings) {
    return {manifest.workers, settings.evaluation.ssim};
}

}  // namespace

int cmd_detect(const RunManifest& manifest) {
    validate(manifest);
    const Settings settings = resolve_settings(manifest);
    const auto images = list_images(manifest.input_dir);
    if (images.empty()) {
        spdlog::error("no inputs in {}", manifest.input_dir.string());
        return kInvalidInvocation;
    }
    fs::create_directories(manifest.output_dir / "edges");
    fs::create_directories(manifest.output_dir / "overlays");

    std::vector<std::string> rows(images.size());
    std::vector<bool> failed(images.size(), false);
    parallel_for(images.size(), manifest.workers, [&](std::size_t i) {
        const fs::path& path = images[i];
        const std::string name = relative_name(path, manifest.input_dir);
        try {
            const ColorRaster img = io::load_color(path);
            const PipelineResult r = run_pipeline(img, settings.pipeline);
            const std::string stem = path.stem().string();
            io::save(manifest.output_dir / "edges" / (stem + ".png"), r.edges);
            io::save(manifest.output_dir / "overlays" / (stem + ".png"), overlay_edges(img, r.edges));
            rows[i] = csv_row(name, std::nullopt, &r.trace, "");
            spdlog::info("{}: {} edge pixels in {:.1f} ms", name, count_ones(r.edges), r.trace.total_milliseconds);
        } catch (const std::exception& e) {
            failed[i] = true;
            rows[i] = csv_row(name, std::nullopt, nullptr, e.what());
            spdlog::warn("{}: {}", name, e.what());
        }
    });

    std::string csv = csv_header() + "\n";
    for (const auto& r : rows) {
        csv += r + "\n";
    }
    write_text(manifest.output_dir / "trace.csv", csv);
    const auto n_failed = static_cast<std::size_t>(std::count(failed.begin(), failed.end(), true));
    spdlog::info("processed {} images, {} failed", images.size() - n_failed, n_failed);
    return n_failed == 0 ? kSuccess : kPartialFailure;
}

LoadedCorpus load_corpus(const fs::path& images, const fs::path& annotations, const GroundTruthOptions& options) {
    LoadedCorpus corpus;
    for (const auto& path : list_images(images)) {
        const std::string name = relative_name(path, images);
        try {
            ColorRaster img = io::load_color(path);
            const fs::path labels = annotations / (path.stem().string() + ".txt");
            std::vector<PolygonAnnotation> anns;
            if (fs::exists(labels)) {
                anns = load_annotations(labels);
            }
            EdgeMap truth = rasterize_ground_truth(anns, img.width(), img.height(), options);
            corpus.items.push_back({name, std::move(img), std::move(truth)});
        } catch (const std::exception& e) {
            corpus.failures.emplace_back(name, e.what());
            spdlog::warn("{}: {}", name, e.what());
        }
    }
    return corpus;
}

namespace {

void write_scores_csv(const fs::path& path, const CorpusRun& run,
                      const std::vector<std::pair<std::string, std::string>>& failures) {
    std::vector<std::string> rows;
    for (const auto& img : run.images) {
        rows.push_back(csv_row(img.id, img.scores, img.trace.stages.empty() ? nullptr : &img.trace, img.error));
    }
    for (const auto& [name, err] : failures) {
        rows.push_back(csv_row(name, std::nullopt, nullptr, err));
    }
    std::sort(rows.begin(), rows.end());
    std::string csv = csv_header() + "\n";
    for (const auto& r : rows) {
        csv += r + "\n";
    }
    write_text(path, csv);
}

struct ScoredCorpus {
    LoadedCorpus corpus;
    Settings settings;
};

std::optional<ScoredCorpus> prepare_corpus(const RunManifest& manifest) {
    validate(manifest);
    ScoredCorpus out{{}, resolve_settings(manifest)};
    out.corpus = load_corpus(manifest.input_dir, *manifest.annotation_dir, out.settings.evaluation.ground_truth);
    if (out.corpus.items.empty()) {
        spdlog::error("no inputs in {}", manifest.input_dir.string());
        return std::nullopt;
    }
    fs::create_directories(manifest.output_dir);
    return out;
}

// Corpus means, or nullopt when no image could be scored.
std::optional<CorpusRun> try_evaluate(const std::vector<CorpusItem>& items, const PipelineConfig& cfg,
                                      const ExecutionOptions& options) {
    try {
        return evaluate_pipeline(items, cfg, options);
    } catch (const UndefinedScoreError& e) {
        spdlog::warn("{}", e.what());
        return std::nullopt;
    }
}

std::string score_cells(const std::optional<CorpusRun>& run) {
    if (!run) {
        return ",";
    }
    return fmt::format("{:.6f},{:.6f}", run->summary.mean.tp, run->summary.mean.fp);
}

}  // namespace

int cmd_compare(const RunManifest& manifest) {
    auto prepared = prepare_corpus(manifest);
    if (!prepared) {
        return kInvalidInvocation;
    }
    const auto& [corpus, settings] = *prepared;
    const ExecutionOptions exec = execution_options(manifest, settings);

    const auto speed_run = try_evaluate(corpus.items, settings.pipeline, exec);
    const auto raw_run = try_evaluate(corpus.items, raw_canny_config(settings.pipeline), exec);
    if (speed_run) {
        write_scores_csv(manifest.output_dir / "scores_speed.csv", *speed_run, corpus.failures);
    }
    if (raw_run) {
        write_scores_csv(manifest.output_dir / "scores_raw_canny.csv", *raw_run, corpus.failures);
    }

    std::string report = "method,images_scored,images_skipped,tp,fp\n";
    const auto line = [&](const char* method, const std::optional<CorpusRun>& run) {
        const std::size_t scored = run ? run->summary.scored : 0;
        const std::size_t skipped = run ? run->summary.skipped : corpus.items.size();
        report += fmt::format("{},{},{},{}\n", method, scored, skipped + corpus.failures.size(), score_cells(run));
        if (run) {
            spdlog::info("{}: tp {:.4f} fp {:.4f} over {} images", method, run->summary.mean.tp, run->summary.mean.fp,
                         scored);
        }
    };
    line("raw_canny", raw_run);
    line("speed", speed_run);
    write_text(manifest.output_dir / "compare.csv", report);

    if (!speed_run || !raw_run) {
        return kPartialFailure;
    }
    const bool any_error = !corpus.failures.empty() ||
                           std::any_of(speed_run->images.begin(), speed_run->images.end(),
                                       [](const ImageOutcome& o) { return !o.scores; });
    return any_error ? kPartialFailure : kSuccess;
}

int cmd_ablate(const RunManifest& manifest) {
    auto prepared = prepare_corpus(manifest);
    if (!prepared) {
        return kInvalidInvocation;
    }
    const auto& [corpus, settings] = *prepared;
    const ExecutionOptions exec = execution_options(manifest, settings);
    const PipelineConfig& base = settings.pipeline;

    const auto full = try_evaluate(corpus.items, base, exec);
    if (!full) {
        return kPartialFailure;
    }
    const ScorePair ref = full->summary.mean;
    std::string report = "variant,tp,fp,tp_change_pct,fp_change_pct\n";
    report += fmt::format("full,{:.6f},{:.6f},0.00,0.00\n", ref.tp, ref.fp);
    for (Stage s : base.enabled_stages()) {
        if (s == Stage::WB) {
            continue;
        }
        const ScorePair r = run_ablation(corpus.items, base, s, exec);
        const double dtp = ref.tp > 0 ? 100.0 * (r.tp - ref.tp) / ref.tp : 0.0;
        const double dfp = ref.fp > 0 ? 100.0 * (r.fp - ref.fp) / ref.fp : 0.0;
        report += fmt::format("without_{},{:.6f},{:.6f},{:.2f},{:.2f}\n", to_string(s), r.tp, r.fp, dtp, dfp);
        spdlog::info("without {}: tp {:.4f} ({:+.2f}%) fp {:.4f} ({:+.2f}%)", to_string(s), r.tp, dtp, r.fp, dfp);
    }
    write_text(manifest.output_dir / "ablation.csv", report);

    // Never-on versus always-on for each conditional stage.
    std::string cond = "filter,tp_no_filter,fp_no_filter,tp_always_on,fp_always_on,fired,images\n";
    for (Stage s : {Stage::CB, Stage::CN}) {
        if (std::find(base.stage_order.begin(), base.stage_order.end(), s) == base.stage_order.end()) {
            continue;
        }
        const ScorePair never = run_ablation(corpus.items, base, s, exec);
        PipelineConfig forced = base;
        forced.disabled_stages.erase(s);
        forced.forced_stages.insert(s);
        const ScorePair always = evaluate_pipeline(corpus.items, forced, exec).summary.mean;
        const auto fired = std::count_if(full->images.begin(), full->images.end(), [&](const ImageOutcome& o) {
            const StageTrace* t = o.trace.find(to_string(s));
            return t && t->applied;
        });
        cond += fmt::format("{},{:.6f},{:.6f},{:.6f},{:.6f},{},{}\n", to_string(s), never.tp, never.fp, always.tp,
                            always.fp, fired, full->images.size());
    }
    write_text(manifest.output_dir / "conditionals.csv", cond);
    return corpus.failures.empty() ? kSuccess : kPartialFailure;
}

namespace {

std::vector<std::vector<Stage>> read_orders(const fs::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open orders file " + path.string());
    }
    std::vector<std::vector<Stage>> orders;
    std::string line;
    while (std::getline(in, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) {
            line.erase(hash);
        }
        if (line.find_first_not_of(" \t\r") == std::string::npos) {
            continue;
        }
        orders.push_back(parse_stage_list(line));
    }
    if (orders.empty()) {
        throw ConfigError("orders file lists no orders: " + path.string());
    }
    return orders;
}

}  // namespace

int cmd_order_study(const RunManifest& manifest) {
    const auto orders = manifest.orders_file ? read_orders(*manifest.orders_file) : reference_orders();
    auto prepared = prepare_corpus(manifest);
    if (!prepared) {
        return kInvalidInvocation;
    }
    const auto& [corpus, settings] = *prepared;
    const auto rows = run_order_study(corpus.items, settings.pipeline, orders, execution_options(manifest, settings));
    std::string report = "order,tp,fp\n";
    for (const auto& row : rows) {
        report += fmt::format("{},{:.6f},{:.6f}\n", format_stage_list(row.order), row.scores.tp, row.scores.fp);
        spdlog::info("{}: tp {:.4f} fp {:.4f}", format_stage_list(row.order), row.scores.tp, row.scores.fp);
    }
    write_text(manifest.output_dir / "order_study.csv", report);
    return corpus.failures.empty() ? kSuccess : kPartialFailure;
}

ColorRaster resample_nearest(const ColorRaster& img, int width, int height) {
    ColorRaster out(width, height);
    std::vector<int> xs(static_cast<std::size_t>(width));
    for (int x = 0; x < width; ++x) {
        xs[static_cast<std::size_t>(x)] =
            std::min(img.width() - 1, static_cast<int>((static_cast<long long>(x) * img.width()) / width));
    }
    for (int c = 0; c < 3; ++c) {
        const GrayRaster& src = img.channel(c);
        GrayRaster& dst = out.channel(c);
        for (int y = 0; y < height; ++y) {
            const int sy = std::min(img.height() - 1, static_cast<int>((static_cast<long long>(y) * img.height()) / height));
            auto row = dst.row(y);
            const auto srow = src.row(sy);
            for (int x = 0; x < width; ++x) {
                row[static_cast<std::size_t>(x)] = srow[static_cast<std::size_t>(xs[static_cast<std::size_t>(x)])];
            }
        }
    }
    return out;
}

std::vector<BenchRow> run_bench(const ColorRaster& source, const PipelineConfig& config, const std::vector<int>& sizes,
                                int runs, double memory_budget_mb) {
    // Peak working set of one pipeline run, bytes per pixel (input planes,
    // white-balanced copy, gray intermediates and the detector's fields).
    constexpr double kBytesPerPixel = 120.0;
    std::vector<BenchRow> rows;
    for (int size : sizes) {
        BenchRow row;
        row.size = size;
        row.pixels = static_cast<std::size_t>(size) * static_cast<std::size_t>(size);
        const double need_mb = static_cast<double>(row.pixels) * kBytesPerPixel / (1024.0 * 1024.0);
        if (need_mb > memory_budget_mb) {
            row.status = fmt::format("skipped: needs ~{:.0f} MB, budget {:.0f} MB", need_mb, memory_budget_mb);
            spdlog::warn("size {}: {}", size, row.status);
            rows.push_back(row);
            continue;
        }
        const ColorRaster img = resample_nearest(source, size, size);
        std::vector<double> times;
        for (int r = 0; r < runs; ++r) {
            const auto start = std::chrono::steady_clock::now();
            const PipelineResult result = run_pipeline(img, config);
            times.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count());
        }
        std::sort(times.begin(), times.end());
        row.milliseconds = times[times.size() / 2];
        row.status = "ok";
        spdlog::info("size {}: median {:.1f} ms over {} runs", size, *row.milliseconds, runs);
        rows.push_back(row);
    }
    return rows;
}

std::optional<double> loglog_slope(const std::vector<BenchRow>& rows) {
    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rows) {
        if (r.milliseconds && *r.milliseconds > 0.0) {
            pts.emplace_back(std::log(static_cast<double>(r.pixels)), std::log(*r.milliseconds));
        }
    }
    if (pts.size() < 2) {
        return std::nullopt;
    }
    double mx = 0.0;
    double my = 0.0;
    for (const auto& [x, y] : pts) {
        mx += x;
        my += y;
    }
    mx /= static_cast<double>(pts.size());
    my /= static_cast<double>(pts.size());
    double sxy = 0.0;
    double sxx = 0.0;
    for (const auto& [x, y] : pts) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if (sxx <= 0.0) {
        return std::nullopt;
    }
    return sxy / sxx;
}

ColorRaster plot_bench(const std::vector<BenchRow>& rows, int width, int height) {
    GrayRaster white(width, height, 1.0);
    ColorRaster canvas = ColorRaster::from_gray(white);
    const int left = 40;
    const int right = width - 20;
    const int top = 20;
    const int bottom = height - 40;

    EdgeMap axes(width, height, 0);
    draw_line(axes, left, bottom, right, bottom);
    draw_line(axes, left, bottom, left, top);

    std::vector<std::pair<double, double>> pts;
    for (const auto& r : rows) {
        if (r.milliseconds && *r.milliseconds > 0.0) {
            pts.emplace_back(std::log10(static_cast<double>(r.pixels)), std::log10(*r.milliseconds));
        }
    }
    EdgeMap curve(width, height, 0);
    EdgeMap marks(width, height, 0);
    if (!pts.empty()) {
        auto [xmin, xmax] = std::minmax_element(pts.begin(), pts.end(), [](auto a, auto b) { return a.first < b.first; });
        auto [ymin, ymax] = std::minmax_element(pts.begin(), pts.end(), [](auto a, auto b) { return a.second < b.second; });
        const double x0 = xmin->first - 0.1;
        const double x1 = xmax->first + 0.1;
        const double y0 = ymin->second - 0.1;
        const double y1 = ymax->second + 0.1;
        const auto px = [&](double v) { return left + static_cast<int>((v - x0) / (x1 - x0) * (right - left)); };
        const auto py = [&](double v) { return bottom - static_cast<int>((v - y0) / (y1 - y0) * (bottom - top)); };
        for (std::size_t i = 0; i < pts.size(); ++i) {
            const int x = px(pts[i].first);
            const int y = py(pts[i].second);
            for (int d = -3; d <= 3; ++d) {
                draw_line(marks, x - 3, y + d, x + 3, y + d);
            }
            if (i + 1 < pts.size()) {
                draw_line(curve, x, y, px(pts[i + 1].first), py(pts[i + 1].second));
            }
        }
    }
    const auto paint = [&](const EdgeMap& m, double r, double g, double b) {
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                if (m(x, y) != 0) {
                    canvas.channel(0)(x, y) = r;
                    canvas.channel(1)(x, y) = g;
                    canvas.channel(2)(x, y) = b;
                }
            }
        }
    };
    paint(axes, 0.0, 0.0, 0.0);
    paint(curve, 0.1, 0.3, 0.8);
    paint(marks, 0.8, 0.1, 0.1);
    return canvas;
}

int cmd_bench(const RunManifest& manifest) {
    validate(manifest);
    const Settings settings = resolve_settings(manifest);
    const auto images = list_images(manifest.input_dir);
    std::optional<ColorRaster> source;
    for (const auto& path : images) {
        try {
            source = io::load_color(path);
            spdlog::info("bench source: {}", path.string());
            break;
        } catch (const std::exception& e) {
            spdlog::warn("{}: {}", path.string(), e.what());
        }
    }
    if (!source) {
        spdlog::error("no inputs in {}", manifest.input_dir.string());
        return kInvalidInvocation;
    }
    fs::create_directories(manifest.output_dir);
    const auto rows = run_bench(*source, settings.pipeline, manifest.bench_sizes, manifest.bench_runs,
                                manifest.memory_budget_mb);
    std::string csv = "size,pixels,milliseconds,status\n";
    for (const auto& r : rows) {
        csv += fmt::format("{},{},{},{}\n", r.size, r.pixels,
                           r.milliseconds ? fmt::format("{:.3f}", *r.milliseconds) : std::string(), r.status);
    }
    write_text(manifest.output_dir / "bench.csv", csv);
    io::save(manifest.output_dir / "bench.png", plot_bench(rows));
    if (const auto slope = loglog_slope(rows)) {
        spdlog::info("log-log slope of time vs pixels: {:.3f}", *slope);
    }
    const bool skipped = std::any_of(rows.begin(), rows.end(), [](const BenchRow& r) { return !r.milliseconds; });
    return skipped ? kPartialFailure : kSuccess;
}

int run(const RunManifest& manifest) {
    switch (manifest.mode) {
        case Mode::detect:
            return cmd_detect(manifest);
        case Mode::evaluate:
            return cmd_compare(manifest);
        case Mode::ablate:
            return cmd_ablate(manifest);
        case Mode::order_study:
            return cmd_order_study(manifest);
        case Mode::bench:
            return cmd_bench(manifest);
    }
    return kInvalidInvocation;
}

}  // namespace speed::cli
