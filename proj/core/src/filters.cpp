#include "speed/filters.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "speed/canny.hpp"

namespace speed {

void validate(const DiffusionParams& params) {
    if (params.iterations < 0) {
        throw ConfigError("diffusion iterations must be non-negative");
    }
    if (!(params.time_step > 0.0 && params.time_step <= 0.25)) {
        throw ConfigError("diffusion time_step must lie in (0, 0.25]");
    }
    if (params.k_mode == KMode::fixed && !(params.k > 0.0)) {
        throw ConfigError("diffusion k must be positive");
    }
}

void validate(const ConditionalTriggerParams& params) {
    const auto in_open_unit = [](double v) { return v > 0.0 && v < 1.0; };
    if (!in_open_unit(params.skew_tail_fraction) || params.skew_tail_fraction > 0.5) {
        throw ConfigError("skew_tail_fraction must lie in (0, 0.5]");
    }
    if (!(params.skew_ratio_threshold > 1.0)) {
        throw ConfigError("skew_ratio_threshold must exceed 1");
    }
    if (!in_open_unit(params.shift_factor)) {
        throw ConfigError("shift_factor must lie in (0, 1)");
    }
    if (!in_open_unit(params.sparse_bin_fraction)) {
        throw ConfigError("sparse_bin_fraction must lie in (0, 1)");
    }
    if (!in_open_unit(params.sparse_bin_trigger)) {
        throw ConfigError("sparse_bin_trigger must lie in (0, 1)");
    }
}

void validate(const GaussianParams& params) {
    if (!(params.sigma > 0.0) || !std::isfinite(params.sigma)) {
        throw ConfigError("gaussian sigma must be positive");
    }
}

// --- white balance --------------------------------------------------------

std::array<double, 3> gray_world_gains(const ColorRaster& img) {
    std::array<double, 3> means{};
    for (int c = 0; c < 3; ++c) {
        means[static_cast<std::size_t>(c)] = mean(img.channel(c));
    }
    const double target = (means[0] + means[1] + means[2]) / 3.0;
    std::array<double, 3> gains{};
    for (std::size_t c = 0; c < 3; ++c) {
        if (means[c] <= 0.0) {
            throw DegenerateInputError("white balance: channel " + std::to_string(c) + " has zero mean");
        }
        gains[c] = target / means[c];
    }
    return gains;
}

WhiteBalanceResult white_balance(const ColorRaster& img) {
    WhiteBalanceResult result{img, {1.0, 1.0, 1.0}, false};
    try {
        result.gains = gray_world_gains(img);
    } catch (const DegenerateInputError&) {
        result.degenerate = true;
        return result;
    }
    for (int c = 0; c < 3; ++c) {
        const double gain = result.gains[static_cast<std::size_t>(c)];
        for (double& v : result.image.channel(c).values()) {
            v = std::clamp(v * gain, 0.0, 1.0);
        }
    }
    return result;
}

// --- anisotropic diffusion ------------------------------------------------

double resolve_diffusion_k(const GrayRaster& img, const DiffusionParams& params) {
    if (params.k_mode == KMode::fixed) {
        return params.k;
    }
    if (img.width() < 2 || img.height() < 2) {
        return 0.0;
    }
    return noise_estimate(img);
}

double conduction(double difference, double k) noexcept {
    if (difference == 0.0) {
        return 1.0;
    }
    if (k <= 0.0) {
        return 0.0;
    }
    const double r = difference / k;
    return std::exp(-r * r);
}

GrayRaster diffuse_once(const GrayRaster& img, double k, double time_step) {
    const int w = img.width();
    const int h = img.height();
    GrayRaster out = img;
    // Each interior edge carries one flux, added to one side and removed from
    // the other, so the update is conservative; border edges carry none.
    for (int y = 0; y < h; ++y) {
        const auto cur = img.row(y);
        for (int x = 0; x < w; ++x) {
            const double v = cur[static_cast<std::size_t>(x)];
            if (x + 1 < w) {
                const double d = cur[static_cast<std::size_t>(x) + 1] - v;
                const double flux = time_step * conduction(d, k) * d;
                out(x, y) += flux;
                out(x + 1, y) -= flux;
            }
            if (y + 1 < h) {
                const double d = img(x, y + 1) - v;
                const double flux = time_step * conduction(d, k) * d;
                out(x, y) += flux;
                out(x, y + 1) -= flux;
            }
        }
    }
    return out;
}

GrayRaster anisotropic_diffusion(const GrayRaster& img, const DiffusionParams& params) {
    validate(params);
    if (params.iterations == 0) {
        return img;
    }
    const double k = resolve_diffusion_k(img, params);
    if (!std::isfinite(k)) {
        throw NumericInstabilityError("anisotropic diffusion: non-finite edge-stopping scale");
    }
    GrayRaster cur = img;
    for (int it = 0; it < params.iterations; ++it) {
        cur = diffuse_once(cur, k, params.time_step);
        for (double v : cur.values()) {
            if (!std::isfinite(v)) {
                throw NumericInstabilityError("anisotropic diffusion: non-finite value at iteration " +
                                              std::to_string(it + 1));
            }
        }
    }
    clip_unit(cur);
    return cur;
}

// --- conditional contrast normalization ----------------------------------

int skew_tail_bins(const ConditionalTriggerParams& params) noexcept {
    const int bins = static_cast<int>(std::lround(params.skew_tail_fraction * kHistogramBins));
    return std::clamp(bins, 1, kHistogramBins / 2);
}

SkewStatistics measure_skew(const IntensityHistogram& hist, const ConditionalTriggerParams& params) {
    const int tail = skew_tail_bins(params);
    SkewStatistics s;
    for (int b = 0; b < tail; ++b) {
        s.lower_mass += hist.bins[static_cast<std::size_t>(b)];
        s.upper_mass += hist.bins[static_cast<std::size_t>(kHistogramBins - 1 - b)];
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    if (s.upper_mass == 0 && s.lower_mass == 0) {
        return s;
    }
    if (s.lower_mass == 0) {
        s.ratio = inf;
        s.direction = SkewDirection::bright;
        return s;
    }
    if (s.upper_mass == 0) {
        s.ratio = inf;
        s.direction = SkewDirection::dark;
        return s;
    }
    const double up = static_cast<double>(s.upper_mass) / static_cast<double>(s.lower_mass);
    const double down = static_cast<double>(s.lower_mass) / static_cast<double>(s.upper_mass);
    if (up > params.skew_ratio_threshold) {
        s.direction = SkewDirection::bright;
        s.ratio = up;
    } else if (down > params.skew_ratio_threshold) {
        s.direction = SkewDirection::dark;
        s.ratio = down;
    } else {
        s.ratio = std::max(up, down);
    }
    return s;
}

ContrastResult conditional_contrast_normalization(const GrayRaster& img, const ConditionalTriggerParams& params,
                                                  bool force) {
    validate(params);
    ContrastResult result{img, false, measure_skew(histogram(img), params)};
    SkewDirection direction = result.skew.direction;
    if (direction == SkewDirection::none) {
        if (!force) {
            return result;
        }
        direction = result.skew.upper_mass >= result.skew.lower_mass ? SkewDirection::bright : SkewDirection::dark;
    }

    GrayRaster shifted = img;
    const double f = params.shift_factor;
    for (double& v : shifted.values()) {
        if (params.shift_mode == ShiftMode::additive) {
            v += direction == SkewDirection::bright ? -f : f;
        } else {
            v *= direction == SkewDirection::bright ? (1.0 - f) : (1.0 + f);
        }
    }
    const auto [lo, hi] = min_max(shifted);
    if (!(hi > lo)) {
        // Nothing to stretch; a constant image stays as it was.
        return result;
    }
    const double scale = 1.0 / (hi - lo);
    for (double& v : shifted.values()) {
        v = v == hi ? 1.0 : std::clamp((v - lo) * scale, 0.0, 1.0);
    }
    result.image = std::move(shifted);
    result.applied = true;
    return result;
}

// --- fuzzy histogram hyperbolization -------------------------------------

double hyperbolize(double membership, int levels) noexcept {
    const double top = static_cast<double>(levels - 1);
    const double lambda = top / std::expm1(-1.0);
    return lambda * std::expm1(-membership) / top;
}

GrayRaster fuzzy_histogram_hyperbolization(const GrayRaster& img, int levels) {
    if (levels < 2) {
        throw ConfigError("hyperbolization needs at least 2 levels");
    }
    const auto [gmin, gmax] = min_max(img);
    if (!(gmax > gmin)) {
        return img;
    }
    GrayRaster out = img;
    const double range = gmax - gmin;
    for (double& v : out.values()) {
        if (v == gmin) {
            v = 0.0;
        } else if (v == gmax) {
            v = 1.0;
        } else {
            v = std::clamp(hyperbolize((v - gmin) / range, levels), 0.0, 1.0);
        }
    }
    return out;
}

// --- blurs ----------------------------------------------------------------

GrayRaster median_blur(const GrayRaster& img) {
    const int w = img.width();
    const int h = img.height();
    GrayRaster out(w, h);
    std::array<double, 9> window{};
    for (int y = 0; y < h; ++y) {
        const int rows[3] = {reflect_index(y - 1, h), y, reflect_index(y + 1, h)};
        for (int x = 0; x < w; ++x) {
            const int cols[3] = {reflect_index(x - 1, w), x, reflect_index(x + 1, w)};
            std::size_t n = 0;
            for (int ry : rows) {
                for (int cx : cols) {
                    window[n++] = img(cx, ry);
                }
            }
            std::nth_element(window.begin(), window.begin() + 4, window.end());
            out(x, y) = window[4];
        }
    }
    return out;
}

std::array<double, 9> gaussian_kernel_3x3(const GaussianParams& params) {
    validate(params);
    std::array<double, 9> k{};
    const double denom = 2.0 * params.sigma * params.sigma;
    double sum = 0.0;
    for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
            const double wgt = std::exp(-static_cast<double>(dx * dx + dy * dy) / denom);
            k[static_cast<std::size_t>((dy + 1) * 3 + (dx + 1))] = wgt;
            sum += wgt;
        }
    }
    for (double& v : k) {
        v /= sum;
    }
    return k;
}

GrayRaster gaussian_blur(const GrayRaster& img, const GaussianParams& params) {
    const auto kernel = gaussian_kernel_3x3(params);
    const int w = img.width();
    const int h = img.height();
    GrayRaster out(w, h);
    for (int y = 0; y < h; ++y) {
        const int rows[3] = {reflect_index(y - 1, h), y, reflect_index(y + 1, h)};
        for (int x = 0; x < w; ++x) {
            const int cols[3] = {reflect_index(x - 1, w), x, reflect_index(x + 1, w)};
            double acc = 0.0;
            double lo = 1.0;
            double hi = 0.0;
            std::size_t k = 0;
            for (int ry : rows) {
                for (int cx : cols) {
                    const double v = img(cx, ry);
                    acc += kernel[k++] * v;
                    lo = std::min(lo, v);
                    hi = std::max(hi, v);
                }
            }
            // A convex combination cannot leave the window's range; pin rounding.
            out(x, y) = std::clamp(acc, lo, hi);
        }
    }
    return out;
}

SparseBinStatistics measure_sparse_bins(const IntensityHistogram& hist, const ConditionalTriggerParams& params) {
    SparseBinStatistics s;
    const double cutoff = params.sparse_bin_fraction * static_cast<double>(hist.total) * (1.0 + 1e-12);
    for (std::uint64_t count : hist.bins) {
        if (count == 0) {
            continue;
        }
        ++s.non_empty_bins;
        if (static_cast<double>(count) <= cutoff) {
            ++s.sparse_bins;
        }
    }
    const int denominator =
        params.sparse_denominator == SparseDenominator::non_empty_bins ? s.non_empty_bins : kHistogramBins;
    s.sparse_fraction = denominator > 0 ? static_cast<double>(s.sparse_bins) / denominator : 0.0;
    return s;
}

ConditionalBlurResult conditional_gaussian_blur(const GrayRaster& img, const ConditionalTriggerParams& params,
                                                const GaussianParams& gaussian, bool force) {
    validate(params);
    ConditionalBlurResult result{img, false, measure_sparse_bins(histogram(img), params)};
    const int denominator = params.sparse_denominator == SparseDenominator::non_empty_bins
                                ? result.sparse.non_empty_bins
                                : kHistogramBins;
    const bool fire = static_cast<double>(result.sparse.sparse_bins) > params.sparse_bin_trigger * denominator;
    if (fire || force) {
        result.image = gaussian_blur(img, gaussian);
        result.applied = true;
    }
    return result;
}

}  // namespace speed
