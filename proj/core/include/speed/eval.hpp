#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "speed/raster.hpp"

namespace speed {

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// Object outline in pixel coordinates (DOTA quadrilaterals in practice).
struct PolygonAnnotation {
    std::vector<Point> vertices;
    std::string category;
    bool difficult = false;
};

// Reads "x1 y1 x2 y2 x3 y3 x4 y4 category difficulty" lines. Lines that do not
// start with eight numbers (e.g. "imagesource:" / "gsd:" headers) are skipped.
std::vector<PolygonAnnotation> parse_annotations(std::istream& in);
std::vector<PolygonAnnotation> load_annotations(const std::filesystem::path& path);

struct GroundTruthOptions {
    bool include_difficult = true;
};

// Integer line rasterization from (x0,y0) to (x1,y1), both ends inclusive.
void draw_line(EdgeMap& map, int x0, int y0, int x1, int y1);

// One-pixel-wide closed outlines of every polygon, union of overlaps.
// Vertices are rounded to the nearest pixel and clamped into the raster.
EdgeMap rasterize_ground_truth(const std::vector<PolygonAnnotation>& annotations, int width, int height,
                               const GroundTruthOptions& options = {});

struct SsimParams {
    double sigma = 1.5;
    int window = 11;
    double k1 = 0.01;
    double k2 = 0.03;
    double dynamic_range = 1.0;
};

void validate(const SsimParams& params);

// Normalized 1D Gaussian taps of length params.window.
std::vector<double> ssim_window_weights(const SsimParams& params);

// Pixel-wise SSIM between two binary maps with Gaussian-weighted local
// statistics and reflect-padded borders.
SsimMap ssim_map(const EdgeMap& ground_truth, const EdgeMap& predicted, const SsimParams& params = {});

// 1 where the SSIM score is strictly positive.
EdgeMap matching_map(const SsimMap& ssim);

// sum(M & G) / sum(G). Throws UndefinedScoreError when G is empty.
double tp_score(const EdgeMap& matching, const EdgeMap& ground_truth);

// sum(!M & D) / sum(G). Throws UndefinedScoreError when G is empty.
double fp_score(const EdgeMap& matching, const EdgeMap& predicted, const EdgeMap& ground_truth);

struct ScorePair {
    double tp = 0.0;
    double fp = 0.0;
};

// Full metric for one image: SSIM map, matching map, then both scores.
ScorePair score_image(const EdgeMap& predicted, const EdgeMap& ground_truth, const SsimParams& params = {});

struct EdgePair {
    EdgeMap predicted;
    EdgeMap ground_truth;
};

struct CorpusScores {
    ScorePair mean;
    std::size_t scored = 0;
    std::size_t skipped = 0;
};

// Unweighted per-image means over pairs whose ground truth is non-empty.
// Throws UndefinedScoreError when every pair is skipped.
CorpusScores evaluate_corpus(const std::vector<EdgePair>& pairs, const SsimParams& params = {});

// Mean over already-computed per-image scores, in the given order.
ScorePair mean_scores(const std::vector<ScorePair>& scores);

}  // namespace speed
