#include <gtest/gtest.h>

#include "speed/pipeline.hpp"
#include "synthetic_scene.hpp"
#include "test_support.hpp"

using namespace speed;

namespace {

ColorRaster sample_image(std::uint64_t seed = 3) {
    synth::SceneOptions opts;
    opts.width = 96;
    opts.height = 80;
    return synth::generate_scene(seed, opts).image;
}

std::vector<CorpusItem> small_corpus(std::size_t n) {
    synth::SceneOptions opts;
    opts.width = 96;
    opts.height = 96;
    return synth::generate_corpus(n, 17, opts);
}

}  // namespace

TEST(Stages, ParseAndFormat) {
    EXPECT_EQ(parse_stage("fhh"), Stage::FHH);
    EXPECT_THROW(parse_stage("XX"), ConfigError);
    const auto order = parse_stage_list(" WB - ad,CN ");
    EXPECT_EQ(format_stage_list(order), "WB-AD-CN");
    EXPECT_EQ(format_stage_list(canonical_order()), "WB-AD-CN-FHH-MB-GB-CB");
    EXPECT_TRUE(is_conditional(Stage::CB));
    EXPECT_FALSE(is_conditional(Stage::GB));
}

TEST(PipelineConfig, Validation) {
    PipelineConfig c;
    EXPECT_NO_THROW(validate(c));
    c.stage_order = parse_stage_list("WB-AD-AD");
    EXPECT_THROW(validate(c), ConfigError);
    c.stage_order = parse_stage_list("AD-WB");
    EXPECT_THROW(validate(c), ConfigError);
    c.stage_order = parse_stage_list("AD-MB");
    EXPECT_NO_THROW(validate(c));
    c.forced_stages = {Stage::MB};
    EXPECT_THROW(validate(c), ConfigError);
}

TEST(RunPipeline, AllStagesDisabledIsRawCanny) {
    const ColorRaster img = sample_image();
    const PipelineResult r = run_pipeline(img, raw_canny_config());
    EXPECT_EQ(r.edges, canny_detect(to_grayscale(img)));
    ASSERT_EQ(r.trace.stages.size(), 1u);
    EXPECT_EQ(r.trace.stages[0].stage, "Canny");
}

TEST(RunPipeline, ConstantInputHasNoEdges) {
    const ColorRaster flat(GrayRaster(40, 30, 0.3), GrayRaster(40, 30, 0.5), GrayRaster(40, 30, 0.7));
    PipelineConfig forced;
    forced.force_conditionals = true;
    for (const PipelineConfig& cfg : {PipelineConfig{}, raw_canny_config(), forced}) {
        EXPECT_EQ(count_ones(run_pipeline(flat, cfg).edges), 0u);
    }
}

TEST(RunPipeline, TraceCompletenessAndOrder) {
    const ColorRaster img = sample_image();
    PipelineConfig cfg;
    cfg.disabled_stages = {Stage::MB, Stage::CN};
    const PipelineResult r = run_pipeline(img, cfg);
    ASSERT_EQ(r.trace.stages.size(), cfg.enabled_stages().size() + 1);
    const char* expected[] = {"WB", "AD", "FHH", "GB", "CB", "Canny"};
    for (std::size_t i = 0; i < r.trace.stages.size(); ++i) {
        EXPECT_EQ(r.trace.stages[i].stage, expected[i]);
    }
    for (std::size_t i = 1; i < r.trace.stages.size(); ++i) {
        EXPECT_EQ(r.trace.stages[i].input_checksum, r.trace.stages[i - 1].output_checksum);
    }
    EXPECT_TRUE(r.trace.find("AD")->diffusion_k.has_value());
    EXPECT_TRUE(r.trace.find("CB")->sparse_fraction.has_value());
    EXPECT_TRUE(r.trace.find("Canny")->canny_thresholds.has_value());
    EXPECT_EQ(r.trace.find("MB"), nullptr);
}

TEST(RunPipeline, Deterministic) {
    const ColorRaster img = sample_image(9);
    const PipelineResult a = run_pipeline(img, {});
    const PipelineResult b = run_pipeline(img, {});
    EXPECT_EQ(a.edges, b.edges);
    ASSERT_EQ(a.trace.stages.size(), b.trace.stages.size());
    for (std::size_t i = 0; i < a.trace.stages.size(); ++i) {
        EXPECT_EQ(a.trace.stages[i].output_checksum, b.trace.stages[i].output_checksum);
        EXPECT_EQ(a.trace.stages[i].applied, b.trace.stages[i].applied);
    }
}

TEST(RunPipeline, DisablingEqualsDeleting) {
    const ColorRaster img = sample_image(4);
    for (Stage s : {Stage::AD, Stage::FHH, Stage::GB, Stage::CB}) {
        PipelineConfig disabled;
        disabled.disabled_stages = {s};
        PipelineConfig deleted;
        deleted.stage_order.erase(std::find(deleted.stage_order.begin(), deleted.stage_order.end(), s));
        EXPECT_EQ(run_pipeline(img, disabled).edges, run_pipeline(img, deleted).edges) << to_string(s);
    }
}

TEST(RunPipeline, GrayscaleFollowsWhiteBalanceInAnyOrder) {
    const ColorRaster img = sample_image(5);
    PipelineConfig cfg;
    cfg.stage_order = parse_stage_list("WB-MB-GB-CB-CN-FHH-AD");
    const PipelineResult r = run_pipeline(img, cfg);
    EXPECT_EQ(r.trace.stages[0].output_checksum, checksum(to_grayscale(white_balance(img).image)));
}

TEST(RunPipeline, ForcedConditionalsAlwaysApply) {
    const ColorRaster img = sample_image(6);
    PipelineConfig cfg;
    cfg.force_conditionals = true;
    const PipelineResult r = run_pipeline(img, cfg);
    EXPECT_TRUE(r.trace.find("CN")->applied);
    EXPECT_TRUE(r.trace.find("CB")->applied);
    PipelineConfig only_cb;
    only_cb.forced_stages = {Stage::CB};
    EXPECT_TRUE(run_pipeline(img, only_cb).trace.find("CB")->applied);
}

TEST(RunPipeline, StageFailureNamesStage) {
    ColorRaster tiny(2, 2);
    try {
        run_pipeline(tiny, {});
        FAIL() << "expected StageError";
    } catch (const StageError& e) {
        EXPECT_EQ(e.stage(), "Canny");
    }
}

TEST(RunPipeline, DegenerateWhiteBalanceIsFlagged) {
    ColorRaster img = sample_image();
    img.channel(2) = GrayRaster(img.width(), img.height(), 0.0);
    const PipelineResult r = run_pipeline(img, {});
    EXPECT_TRUE(r.trace.find("WB")->degenerate);
}

TEST(Corpus, ParallelMatchesSerial) {
    const auto corpus = small_corpus(6);
    const CorpusRun serial = evaluate_pipeline(corpus, {}, {1, {}});
    const CorpusRun parallel = evaluate_pipeline(corpus, {}, {4, {}});
    EXPECT_EQ(serial.summary.mean.tp, parallel.summary.mean.tp);
    EXPECT_EQ(serial.summary.mean.fp, parallel.summary.mean.fp);
    ASSERT_EQ(serial.images.size(), 6u);
    for (std::size_t i = 1; i < serial.images.size(); ++i) {
        EXPECT_LT(serial.images[i - 1].id, serial.images[i].id);
    }
}

TEST(Corpus, EmptyGroundTruthIsSkipped) {
    auto corpus = small_corpus(3);
    corpus[1].ground_truth = EdgeMap(corpus[1].image.width(), corpus[1].image.height());
    const CorpusRun run = evaluate_pipeline(corpus, {});
    EXPECT_EQ(run.summary.scored, 2u);
    EXPECT_EQ(run.summary.skipped, 1u);
    EXPECT_FALSE(run.images[1].scores.has_value());
    std::vector<CorpusItem> none{corpus[1]};
    EXPECT_THROW(evaluate_pipeline(none, {}), UndefinedScoreError);
}

TEST(Ablation, RemovingNeverFiringStageIsNoOp) {
    const auto corpus = small_corpus(4);
    PipelineConfig base;
    base.triggers.sparse_bin_trigger = 0.999;  // CB can no longer fire
    const CorpusRun full = evaluate_pipeline(corpus, base);
    for (const auto& o : full.images) {
        ASSERT_FALSE(o.trace.find("CB")->applied);
    }
    const ScorePair without = run_ablation(corpus, base, Stage::CB);
    EXPECT_EQ(without.tp, full.summary.mean.tp);
    EXPECT_EQ(without.fp, full.summary.mean.fp);
    PipelineConfig no_mb = base;
    no_mb.stage_order = parse_stage_list("WB-AD");
    EXPECT_THROW(run_ablation(corpus, no_mb, Stage::MB), ConfigError);
}

TEST(OrderStudy, IdenticalOrdersGiveIdenticalRows) {
    const auto corpus = small_corpus(3);
    const auto order = parse_stage_list("WB-FHH-AD-MB-GB-CB-CN");
    const auto rows = run_order_study(corpus, {}, {order, order, canonical_order()});
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[0].scores.tp, rows[1].scores.tp);
    EXPECT_EQ(rows[0].scores.fp, rows[1].scores.fp);
    EXPECT_THROW(run_order_study(corpus, {}, {parse_stage_list("AD-WB")}), ConfigError);
    EXPECT_THROW(run_order_study(corpus, {}, {parse_stage_list("AD-MB")}), ConfigError);
}

TEST(OrderStudy, ReferenceOrdersStartWithCanonical) {
    const auto& orders = reference_orders();
    ASSERT_EQ(orders.size(), 5u);
    EXPECT_EQ(orders[0], canonical_order());
    for (const auto& o : orders) {
        EXPECT_EQ(o.size(), 7u);
        EXPECT_EQ(o.front(), Stage::WB);
    }
}
