#include "speed/canny.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace speed {

void validate(const CannyParams& params) {
    if (params.low_threshold.has_value() != params.high_threshold.has_value()) {
        throw ConfigError("canny: set both low and high thresholds or neither");
    }
    if (params.low_threshold) {
        const double lo = *params.low_threshold;
        const double hi = *params.high_threshold;
        if (!(lo > 0.0 && lo < hi)) {
            throw ConfigError("canny: thresholds must satisfy 0 < low < high");
        }
    }
    if (!(params.low_ratio > 0.0 && params.low_ratio < 1.0)) {
        throw ConfigError("canny: low_ratio must lie in (0, 1)");
    }
    if (!(params.noise_multiplier > 0.0)) {
        throw ConfigError("canny: noise_multiplier must be positive");
    }
}

double noise_estimate(const GrayRaster& img) {
    const int w = img.width();
    const int h = img.height();
    if (w < 2 || h < 2) {
        throw DegenerateInputError("noise estimate needs at least a 2x2 raster");
    }
    // Central differences inside, one-sided at the borders.
    std::vector<double> mags;
    mags.reserve(img.size());
    for (int y = 0; y < h; ++y) {
        const int yu = std::max(y - 1, 0);
        const int yd = std::min(y + 1, h - 1);
        for (int x = 0; x < w; ++x) {
            const int xl = std::max(x - 1, 0);
            const int xr = std::min(x + 1, w - 1);
            const double gx = (img(xr, y) - img(xl, y)) / (xr - xl);
            const double gy = (img(x, yd) - img(x, yu)) / (yd - yu);
            mags.push_back(std::hypot(gx, gy));
        }
    }
    const auto mid = mags.begin() + static_cast<std::ptrdiff_t>(mags.size() / 2);
    std::nth_element(mags.begin(), mid, mags.end());
    double median = *mid;
    if (mags.size() % 2 == 0) {
        const double lower = *std::max_element(mags.begin(), mid);
        median = 0.5 * (median + lower);
    }
    return 1.4826 * median;
}

Gradient sobel_gradient(const GrayRaster& img) {
    const int w = img.width();
    const int h = img.height();
    Gradient g{ScalarField(w, h), ScalarField(w, h), ScalarField(w, h)};
    for (int y = 0; y < h; ++y) {
        const int yu = reflect_index(y - 1, h);
        const int yd = reflect_index(y + 1, h);
        for (int x = 0; x < w; ++x) {
            const int xl = reflect_index(x - 1, w);
            const int xr = reflect_index(x + 1, w);
            const double gx = (img(xr, yu) + 2.0 * img(xr, y) + img(xr, yd)) -
                              (img(xl, yu) + 2.0 * img(xl, y) + img(xl, yd));
            const double gy = (img(xl, yd) + 2.0 * img(x, yd) + img(xr, yd)) -
                              (img(xl, yu) + 2.0 * img(x, yu) + img(xr, yu));
            g.dx(x, y) = gx / 8.0;
            g.dy(x, y) = gy / 8.0;
            g.magnitude(x, y) = std::hypot(gx, gy) / 8.0;
        }
    }
    return g;
}

int gradient_sector(double dx, double dy) noexcept {
    double angle = std::atan2(dy, dx) * 180.0 / std::numbers::pi;
    if (angle < 0.0) {
        angle += 180.0;
    }
    if (angle < 22.5 || angle >= 157.5) {
        return 0;
    }
    if (angle < 67.5) {
        return 1;
    }
    if (angle < 112.5) {
        return 2;
    }
    return 3;
}

namespace {

// Step toward the positive side of each sector (y grows downward).
constexpr int kSectorStep[4][2] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};

double magnitude_or_zero(const ScalarField& mag, int x, int y) noexcept {
    if (x < 0 || y < 0 || x >= mag.width() || y >= mag.height()) {
        return 0.0;
    }
    return mag(x, y);
}

}  // namespace

ScalarField non_maximum_suppression(const Gradient& grad) {
    const ScalarField& mag = grad.magnitude;
    ScalarField out(mag.width(), mag.height(), 0.0);
    for (int y = 0; y < mag.height(); ++y) {
        for (int x = 0; x < mag.width(); ++x) {
            const double m = mag(x, y);
            if (m <= 0.0) {
                continue;
            }
            const int sector = gradient_sector(grad.dx(x, y), grad.dy(x, y));
            const int sx = kSectorStep[sector][0];
            const int sy = kSectorStep[sector][1];
            const double ahead = magnitude_or_zero(mag, x + sx, y + sy);
            const double behind = magnitude_or_zero(mag, x - sx, y - sy);
            if (m >= behind && m > ahead) {
                out(x, y) = m;
            }
        }
    }
    return out;
}

double otsu_threshold(const ScalarField& magnitude) {
    double top = 0.0;
    for (double m : magnitude.values()) {
        top = std::max(top, m);
    }
    if (!(top > 0.0)) {
        return 0.0;
    }
    std::array<double, 256> hist{};
    double count = 0.0;
    for (double m : magnitude.values()) {
        if (m > 0.0) {
            const int bin = std::min(255, static_cast<int>(m / top * 256.0));
            hist[static_cast<std::size_t>(bin)] += 1.0;
            count += 1.0;
        }
    }
    double total_sum = 0.0;
    for (std::size_t b = 0; b < hist.size(); ++b) {
        total_sum += static_cast<double>(b) * hist[b];
    }
    double best = -1.0;
    int best_bin = -1;
    double w0 = 0.0;
    double sum0 = 0.0;
    for (std::size_t t = 0; t + 1 < hist.size(); ++t) {
        w0 += hist[t];
        sum0 += static_cast<double>(t) * hist[t];
        const double w1 = count - w0;
        if (w0 <= 0.0 || w1 <= 0.0) {
            continue;
        }
        const double mu0 = sum0 / w0;
        const double mu1 = (total_sum - sum0) / w1;
        const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (between > best) {
            best = between;
            best_bin = static_cast<int>(t);
        }
    }
    if (best_bin < 0) {
        // All nonzero magnitudes share one bin.
        return top;
    }
    return static_cast<double>(best_bin + 1) * top / 256.0;
}

Thresholds resolve_thresholds(const GrayRaster& img, const Gradient& grad, const CannyParams& params) {
    if (params.low_threshold && params.high_threshold) {
        return {*params.low_threshold, *params.high_threshold};
    }
    double high = 0.0;
    if (params.auto_mode == AutoThresholdMode::otsu) {
        high = otsu_threshold(grad.magnitude);
    } else {
        high = params.noise_multiplier * noise_estimate(img);
    }
    return {params.low_ratio * high, high};
}

EdgeMap hysteresis(const ScalarField& suppressed, const Thresholds& thresholds) {
    const int w = suppressed.width();
    const int h = suppressed.height();
    EdgeMap out(w, h, 0);
    const auto candidate = [&](int x, int y) {
        const double m = suppressed(x, y);
        return m > 0.0 && m >= thresholds.low;
    };
    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (candidate(x, y) && suppressed(x, y) >= thresholds.high && out(x, y) == 0) {
                out(x, y) = 1;
                stack.emplace_back(x, y);
            }
        }
    }
    // The result is the union of candidate components that contain a strong
    // pixel, independent of visiting order.
    while (!stack.empty()) {
        const auto [x, y] = stack.back();
        stack.pop_back();
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int nx = x + dx;
                const int ny = y + dy;
                if ((dx == 0 && dy == 0) || nx < 0 || ny < 0 || nx >= w || ny >= h) {
                    continue;
                }
                if (out(nx, ny) == 0 && candidate(nx, ny)) {
                    out(nx, ny) = 1;
                    stack.emplace_back(nx, ny);
                }
            }
        }
    }
    return out;
}

CannyResult canny(const GrayRaster& img, const CannyParams& params) {
    validate(params);
    if (img.width() < 3 || img.height() < 3) {
        throw DegenerateInputError("canny needs at least a 3x3 raster");
    }
    const Gradient grad = sobel_gradient(img);
    const Thresholds thresholds = resolve_thresholds(img, grad, params);
    const ScalarField suppressed = non_maximum_suppression(grad);
    return {hysteresis(suppressed, thresholds), thresholds};
}

}  // namespace speed
