#include "speed/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace speed {

std::vector<PolygonAnnotation> parse_annotations(std::istream& in) {
    std::vector<PolygonAnnotation> out;
    std::string line;
    while (std::getline(in, line)) {
        std::istringstream fields(line);
        PolygonAnnotation ann;
        bool ok = true;
        for (int i = 0; i < 4 && ok; ++i) {
            Point p;
            ok = static_cast<bool>(fields >> p.x >> p.y);
            ann.vertices.push_back(p);
        }
        if (!ok) {
            continue;
        }
        int difficulty = 0;
        if (fields >> ann.category) {
            if (!(fields >> difficulty)) {
                difficulty = 0;
            }
        }
        ann.difficult = difficulty != 0;
        out.push_back(std::move(ann));
    }
    return out;
}

std::vector<PolygonAnnotation> load_annotations(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw IoError("cannot open annotation file " + path.string());
    }
    return parse_annotations(in);
}

void draw_line(EdgeMap& map, int x0, int y0, int x1, int y1) {
    const int dx = std::abs(x1 - x0);
    const int dy = -std::abs(y1 - y0);
    const int sx = x0 < x1 ? 1 : -1;
    const int sy = y0 < y1 ? 1 : -1;
    int err = dx + dy;
    while (true) {
        if (x0 >= 0 && y0 >= 0 && x0 < map.width() && y0 < map.height()) {
            map(x0, y0) = 1;
        }
        if (x0 == x1 && y0 == y1) {
            break;
        }
        const int e2 = 2 * err;
        if (e2 >= dy) {
            err += dy;
            x0 += sx;
        }
        if (e2 <= dx) {
            err += dx;
            y0 += sy;
        }
    }
}

EdgeMap rasterize_ground_truth(const std::vector<PolygonAnnotation>& annotations, int width, int height,
                               const GroundTruthOptions& options) {
    EdgeMap map(width, height, 0);
    const auto to_pixel = [](double v, int extent) {
        return std::clamp(static_cast<int>(std::lround(v)), 0, extent - 1);
    };
    for (const auto& ann : annotations) {
        if (ann.difficult && !options.include_difficult) {
            continue;
        }
        if (ann.vertices.size() < 3) {
            throw DegenerateInputError("polygon annotation needs at least 3 vertices");
        }
        const std::size_t n = ann.vertices.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point& a = ann.vertices[i];
            const Point& b = ann.vertices[(i + 1) % n];
            draw_line(map, to_pixel(a.x, width), to_pixel(a.y, height), to_pixel(b.x, width), to_pixel(b.y, height));
        }
    }
    return map;
}

void validate(const SsimParams& params) {
    if (!(params.sigma > 0.0)) {
        throw ConfigError("ssim sigma must be positive");
    }
    if (params.window < 1 || params.window % 2 == 0) {
        throw ConfigError("ssim window must be a positive odd size");
    }
    if (!(params.k1 > 0.0) || !(params.k2 > 0.0) || !(params.dynamic_range > 0.0)) {
        throw ConfigError("ssim constants must be positive");
    }
}

std::vector<double> ssim_window_weights(const SsimParams& params) {
    validate(params);
    const int radius = params.window / 2;
    std::vector<double> taps;
    taps.reserve(static_cast<std::size_t>(params.window));
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        const double v = std::exp(-static_cast<double>(i * i) / (2.0 * params.sigma * params.sigma));
        taps.push_back(v);
        sum += v;
    }
    for (double& v : taps) {
        v /= sum;
    }
    return taps;
}

namespace {

// Separable reflect-padded filtering of several planes at once.
class WindowFilter {
public:
    WindowFilter(int width, int height, std::vector<double> taps)
        : width_(width), height_(height), taps_(std::move(taps)), radius_(static_cast<int>(taps_.size() / 2)) {
        for (int x = 0; x < width_; ++x) {
            for (int k = -radius_; k <= radius_; ++k) {
                col_index_.push_back(reflect_index(x + k, width_));
            }
        }
        for (int y = 0; y < height_; ++y) {
            for (int k = -radius_; k <= radius_; ++k) {
                row_index_.push_back(reflect_index(y + k, height_));
            }
        }
    }

    std::vector<double> apply(const std::vector<double>& plane) const {
        const std::size_t n = taps_.size();
        std::vector<double> tmp(plane.size());
        for (int y = 0; y < height_; ++y) {
            const double* src = plane.data() + static_cast<std::size_t>(y) * width_;
            double* dst = tmp.data() + static_cast<std::size_t>(y) * width_;
            for (int x = 0; x < width_; ++x) {
                const int* idx = col_index_.data() + static_cast<std::size_t>(x) * n;
                double acc = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    acc += taps_[k] * src[idx[k]];
                }
                dst[x] = acc;
            }
        }
        std::vector<double> out(plane.size());
        for (int y = 0; y < height_; ++y) {
            const int* idx = row_index_.data() + static_cast<std::size_t>(y) * n;
            double* dst = out.data() + static_cast<std::size_t>(y) * width_;
            for (int x = 0; x < width_; ++x) {
                double acc = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    acc += taps_[k] * tmp[static_cast<std::size_t>(idx[k]) * width_ + x];
                }
                dst[x] = acc;
            }
        }
        return out;
    }

private:
    int width_;
    int height_;
    std::vector<double> taps_;
    int radius_;
    std::vector<int> col_index_;
    std::vector<int> row_index_;
};

std::size_t count_and(const EdgeMap& a, const EdgeMap& b) {
    std::size_t n = 0;
    const auto av = a.values();
    const auto bv = b.values();
    for (std::size_t i = 0; i < av.size(); ++i) {
        n += (av[i] != 0 && bv[i] != 0) ? 1 : 0;
    }
    return n;
}

void require_same_shape(const EdgeMap& a, const EdgeMap& b, const char* what) {
    if (!a.same_shape(b)) {
        throw DimensionMismatchError(std::string(what) + ": edge maps differ in size");
    }
}

}  // namespace

SsimMap ssim_map(const EdgeMap& ground_truth, const EdgeMap& predicted, const SsimParams& params) {
    require_same_shape(ground_truth, predicted, "ssim_map");
    const int w = ground_truth.width();
    const int h = ground_truth.height();
    const WindowFilter filter(w, h, ssim_window_weights(params));

    const std::size_t n = ground_truth.size();
    std::vector<double> x(n);
    std::vector<double> y(n);
    std::vector<double> xy(n);
    const auto g = ground_truth.values();
    const auto d = predicted.values();
    for (std::size_t i = 0; i < n; ++i) {
        x[i] = g[i];
        y[i] = d[i];
        xy[i] = x[i] * y[i];
    }
    std::vector<double> xx(n);
    std::vector<double> yy(n);
    for (std::size_t i = 0; i < n; ++i) {
        xx[i] = x[i] * x[i];
        yy[i] = y[i] * y[i];
    }
    const auto mu_x = filter.apply(x);
    const auto mu_y = filter.apply(y);
    const auto e_xx = filter.apply(xx);
    const auto e_yy = filter.apply(yy);
    const auto e_xy = filter.apply(xy);

    const double c1 = (params.k1 * params.dynamic_range) * (params.k1 * params.dynamic_range);
    const double c2 = (params.k2 * params.dynamic_range) * (params.k2 * params.dynamic_range);
    SsimMap out(w, h);
    auto dst = out.values();
    for (std::size_t i = 0; i < n; ++i) {
        const double mx = mu_x[i];
        const double my = mu_y[i];
        const double var_x = e_xx[i] - mx * mx;
        const double var_y = e_yy[i] - my * my;
        const double cov = e_xy[i] - mx * my;
        const double num = (2.0 * mx * my + c1) * (2.0 * cov + c2);
        const double den = (mx * mx + my * my + c1) * (var_x + var_y + c2);
        dst[i] = std::clamp(num / den, -1.0, 1.0);
    }
    return out;
}

EdgeMap matching_map(const SsimMap& ssim) {
    EdgeMap out(ssim.width(), ssim.height(), 0);
    auto dst = out.values();
    const auto src = ssim.values();
    for (std::size_t i = 0; i < src.size(); ++i) {
        dst[i] = src[i] > 0.0 ? 1 : 0;
    }
    return out;
}

double tp_score(const EdgeMap& matching, const EdgeMap& ground_truth) {
    require_same_shape(matching, ground_truth, "tp_score");
    const std::size_t total = count_ones(ground_truth);
    if (total == 0) {
        throw UndefinedScoreError("tp_score: ground truth has no edge pixels");
    }
    return static_cast<double>(count_and(matching, ground_truth)) / static_cast<double>(total);
}

double fp_score(const EdgeMap& matching, const EdgeMap& predicted, const EdgeMap& ground_truth) {
    require_same_shape(matching, predicted, "fp_score");
    require_same_shape(matching, ground_truth, "fp_score");
    const std::size_t total = count_ones(ground_truth);
    if (total == 0) {
        throw UndefinedScoreError("fp_score: ground truth has no edge pixels");
    }
    std::size_t unmatched = 0;
    const auto m = matching.values();
    const auto d = predicted.values();
    for (std::size_t i = 0; i < m.size(); ++i) {
        unmatched += (m[i] == 0 && d[i] != 0) ? 1 : 0;
    }
    return static_cast<double>(unmatched) / static_cast<double>(total);
}

ScorePair score_image(const EdgeMap& predicted, const EdgeMap& ground_truth, const SsimParams& params) {
    if (count_ones(ground_truth) == 0) {
        throw UndefinedScoreError("ground truth has no edge pixels");
    }
    const EdgeMap m = matching_map(ssim_map(ground_truth, predicted, params));
    return {tp_score(m, ground_truth), fp_score(m, predicted, ground_truth)};
}

ScorePair mean_scores(const std::vector<ScorePair>& scores) {
    if (scores.empty()) {
        throw UndefinedScoreError("no scored images");
    }
    ScorePair sum;
    for (const auto& s : scores) {
        sum.tp += s.tp;
        sum.fp += s.fp;
    }
    const double n = static_cast<double>(scores.size());
    return {sum.tp / n, sum.fp / n};
}

CorpusScores evaluate_corpus(const std::vector<EdgePair>& pairs, const SsimParams& params) {
    if (pairs.empty()) {
        throw UndefinedScoreError("evaluate_corpus: empty corpus");
    }
    std::vector<ScorePair> scores;
    CorpusScores out;
    for (const auto& pair : pairs) {
        if (count_ones(pair.ground_truth) == 0) {
            ++out.skipped;
            continue;
        }
        scores.push_back(score_image(pair.predicted, pair.ground_truth, params));
    }
    if (scores.empty()) {
        throw UndefinedScoreError("evaluate_corpus: every image has empty ground truth");
    }
    out.mean = mean_scores(scores);
    out.scored = scores.size();
    return out;
}

}  // namespace speed
