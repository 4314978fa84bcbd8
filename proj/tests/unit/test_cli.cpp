#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "commands.hpp"
#include "speed/image_io.hpp"
#include "synthetic_scene.hpp"
#include "test_support.hpp"

using namespace speed;
using namespace speed::cli;
namespace fs = std::filesystem;

namespace {

std::vector<std::string> read_lines(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> lines;
    for (std::string line; std::getline(in, line);) {
        lines.push_back(line);
    }
    return lines;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path make_corpus(const std::string& name, std::size_t n) {
    const auto dir = test::scratch_dir(name);
    synth::SceneOptions opts;
    opts.width = 80;
    opts.height = 72;
    synth::write_corpus(dir, n, 5, opts);
    return dir;
}

std::size_t count_files(const fs::path& dir) {
    return static_cast<std::size_t>(std::distance(fs::directory_iterator(dir), fs::directory_iterator{}));
}

}  // namespace

TEST(Mode, ParseRoundTrip) {
    for (Mode m : {Mode::detect, Mode::evaluate, Mode::ablate, Mode::order_study, Mode::bench}) {
        EXPECT_EQ(parse_mode(to_string(m)), m);
    }
    EXPECT_THROW(parse_mode("train"), ConfigError);
}

TEST(Manifest, Invariants) {
    RunManifest m;
    m.input_dir = "/nonexistent/dir";
    EXPECT_THROW(validate(m), ConfigError);
    m.input_dir = test::scratch_dir("manifest");
    EXPECT_NO_THROW(validate(m));
    m.mode = Mode::evaluate;
    EXPECT_THROW(validate(m), ConfigError);
    m.annotation_dir = m.input_dir;
    EXPECT_NO_THROW(validate(m));
    m.workers = 0;
    EXPECT_THROW(validate(m), ConfigError);
}

TEST(Detect, ThreeImages) {
    const auto corpus = make_corpus("cli_detect3", 3);
    RunManifest m;
    m.input_dir = corpus / "images";
    m.output_dir = corpus / "out";
    m.workers = 2;
    EXPECT_EQ(cmd_detect(m), kSuccess);
    EXPECT_EQ(count_files(m.output_dir / "edges"), 3u);
    EXPECT_EQ(count_files(m.output_dir / "overlays"), 3u);
    const auto lines = read_lines(m.output_dir / "trace.csv");
    ASSERT_EQ(lines.size(), 4u);
    EXPECT_EQ(lines[0], csv_header());
    EXPECT_EQ(lines[1].rfind("scene_0000.png,", 0), 0u);
    EXPECT_EQ(lines[3].rfind("scene_0002.png,", 0), 0u);
    const GrayRaster edges = io::load_gray(m.output_dir / "edges" / "scene_0001.png");
    EXPECT_EQ(edges.width(), 80);
    for (double v : edges.values()) {
        EXPECT_TRUE(v == 0.0 || v == 1.0);
    }
}

TEST(Detect, EmptyDirectory) {
    RunManifest m;
    m.input_dir = test::scratch_dir("cli_empty");
    m.output_dir = m.input_dir / "out";
    EXPECT_EQ(cmd_detect(m), kInvalidInvocation);
}

TEST(Detect, CorruptFileIsReportedNotFatal) {
    const auto corpus = make_corpus("cli_corrupt", 2);
    std::ofstream(corpus / "images" / "broken.png") << "definitely not a png";
    RunManifest m;
    m.input_dir = corpus / "images";
    m.output_dir = corpus / "out";
    EXPECT_EQ(cmd_detect(m), kPartialFailure);
    EXPECT_EQ(count_files(m.output_dir / "edges"), 2u);
    const auto lines = read_lines(m.output_dir / "trace.csv");
    ASSERT_EQ(lines.size(), 4u);
    EXPECT_EQ(lines[1].rfind("broken.png,", 0), 0u);
    EXPECT_NE(lines[1].find("broken.png,,,"), std::string::npos);
    EXPECT_GT(lines[1].size(), std::string("broken.png").size() + 40);
}

TEST(Detect, IdempotentOutputs) {
    const auto corpus = make_corpus("cli_idem", 2);
    RunManifest m;
    m.input_dir = corpus / "images";
    m.output_dir = corpus / "out";
    ASSERT_EQ(cmd_detect(m), kSuccess);
    const std::string first = read_file(m.output_dir / "edges" / "scene_0000.png");
    ASSERT_EQ(cmd_detect(m), kSuccess);
    EXPECT_EQ(read_file(m.output_dir / "edges" / "scene_0000.png"), first);
}

TEST(Compare, WritesReportsDeterministically) {
    const auto corpus = make_corpus("cli_compare", 4);
    RunManifest m;
    m.mode = Mode::evaluate;
    m.input_dir = corpus / "images";
    m.annotation_dir = corpus / "labelTxt";
    m.output_dir = corpus / "out";
    m.workers = 3;
    ASSERT_EQ(run(m), kSuccess);
    const std::string first = read_file(m.output_dir / "compare.csv");
    const auto lines = read_lines(m.output_dir / "compare.csv");
    ASSERT_EQ(lines.size(), 3u);
    EXPECT_EQ(lines[1].rfind("raw_canny,4,0,", 0), 0u);
    EXPECT_EQ(lines[2].rfind("speed,4,0,", 0), 0u);
    EXPECT_EQ(read_lines(m.output_dir / "scores_speed.csv").size(), 5u);
    m.workers = 1;
    ASSERT_EQ(run(m), kSuccess);
    EXPECT_EQ(read_file(m.output_dir / "compare.csv"), first);
}

TEST(Compare, ConstantImageSkipsBothMethods) {
    const auto dir = test::scratch_dir("cli_constant");
    fs::create_directories(dir / "images");
    fs::create_directories(dir / "labels");
    io::save(dir / "images" / "flat.png", ColorRaster::from_gray(GrayRaster(32, 32, 0.5)));
    RunManifest m;
    m.mode = Mode::evaluate;
    m.input_dir = dir / "images";
    m.annotation_dir = dir / "labels";
    m.output_dir = dir / "out";
    EXPECT_EQ(run(m), kPartialFailure);
    const auto lines = read_lines(m.output_dir / "compare.csv");
    ASSERT_EQ(lines.size(), 3u);
    EXPECT_EQ(lines[1], "raw_canny,0,1,,");
    EXPECT_EQ(lines[2], "speed,0,1,,");
}

TEST(Ablate, WritesBothTables) {
    const auto corpus = make_corpus("cli_ablate", 3);
    RunManifest m;
    m.mode = Mode::ablate;
    m.input_dir = corpus / "images";
    m.annotation_dir = corpus / "labelTxt";
    m.output_dir = corpus / "out";
    ASSERT_EQ(run(m), kSuccess);
    const auto ablation = read_lines(m.output_dir / "ablation.csv");
    ASSERT_EQ(ablation.size(), 8u);
    EXPECT_EQ(ablation[1].rfind("full,", 0), 0u);
    EXPECT_EQ(ablation[2].rfind("without_AD,", 0), 0u);
    EXPECT_EQ(read_lines(m.output_dir / "conditionals.csv").size(), 3u);
}

TEST(OrderStudyCmd, ReadsOrdersFile) {
    const auto corpus = make_corpus("cli_orders", 2);
    std::ofstream(corpus / "orders.txt") << "# two orders\nWB-AD-CN-FHH-MB-GB-CB\n\nWB,MB,GB\n";
    RunManifest m;
    m.mode = Mode::order_study;
    m.input_dir = corpus / "images";
    m.annotation_dir = corpus / "labelTxt";
    m.output_dir = corpus / "out";
    m.orders_file = corpus / "orders.txt";
    ASSERT_EQ(run(m), kSuccess);
    const auto lines = read_lines(m.output_dir / "order_study.csv");
    ASSERT_EQ(lines.size(), 3u);
    EXPECT_EQ(lines[2].rfind("WB-MB-GB,", 0), 0u);
    std::ofstream(corpus / "bad.txt") << "AD-WB\n";
    m.orders_file = corpus / "bad.txt";
    EXPECT_THROW(run(m), ConfigError);
}

TEST(Bench, RowsSlopeAndBudget) {
    const ColorRaster src = synth::generate_scene(2, {64, 64}).image;
    const auto rows = run_bench(src, {}, {48, 96}, 1, 4096.0);
    ASSERT_EQ(rows.size(), 2u);
    EXPECT_TRUE(rows[0].milliseconds.has_value());
    EXPECT_EQ(rows[1].pixels, 96u * 96u);
    EXPECT_TRUE(loglog_slope(rows).has_value());
    const auto skipped = run_bench(src, {}, {4096}, 1, 1.0);
    EXPECT_FALSE(skipped[0].milliseconds.has_value());
    EXPECT_NE(skipped[0].status.find("skipped"), std::string::npos);
    EXPECT_FALSE(loglog_slope(skipped).has_value());
}

TEST(Bench, SlopeOfExactPowerLaw) {
    std::vector<BenchRow> rows;
    for (int s : {100, 200, 400}) {
        BenchRow r;
        r.size = s;
        r.pixels = static_cast<std::size_t>(s * s);
        r.milliseconds = 3.0 * std::pow(static_cast<double>(r.pixels), 1.1);
        rows.push_back(r);
    }
    EXPECT_NEAR(*loglog_slope(rows), 1.1, 1e-12);
}

TEST(Bench, CommandWritesCsvAndPlot) {
    const auto corpus = make_corpus("cli_bench", 1);
    RunManifest m;
    m.mode = Mode::bench;
    m.input_dir = corpus / "images";
    m.output_dir = corpus / "out";
    m.bench_sizes = {40};
    m.bench_runs = 1;
    ASSERT_EQ(run(m), kSuccess);
    EXPECT_EQ(read_lines(m.output_dir / "bench.csv").size(), 2u);
    EXPECT_TRUE(fs::exists(m.output_dir / "bench.png"));
}

TEST(Resample, NearestNeighbourKeepsValues) {
    GrayRaster g(2, 2, std::vector<double>{0.0, 0.25, 0.5, 1.0});
    const ColorRaster up = resample_nearest(ColorRaster::from_gray(g), 4, 4);
    EXPECT_EQ(up.red()(0, 0), 0.0);
    EXPECT_EQ(up.red()(3, 0), 0.25);
    EXPECT_EQ(up.red()(1, 3), 0.5);
    EXPECT_EQ(up.red()(2, 2), 1.0);
}

TEST(Overlay, PaintsEdgesRed) {
    const ColorRaster img = ColorRaster::from_gray(GrayRaster(3, 3, 0.5));
    EdgeMap e(3, 3);
    e(1, 1) = 1;
    const ColorRaster o = overlay_edges(img, e);
    EXPECT_EQ(o.red()(1, 1), 1.0);
    EXPECT_EQ(o.green()(1, 1), 0.0);
    EXPECT_EQ(o.red()(0, 0), 0.5);
    EXPECT_THROW(overlay_edges(img, EdgeMap(2, 3)), DimensionMismatchError);
}
