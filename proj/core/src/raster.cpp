#include "speed/raster.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

namespace speed {

ColorRaster::ColorRaster(int width, int height)
    : planes_{GrayRaster(width, height), GrayRaster(width, height), GrayRaster(width, height)} {}

ColorRaster::ColorRaster(GrayRaster red, GrayRaster green, GrayRaster blue)
    : planes_{std::move(red), std::move(green), std::move(blue)} {
    if (!planes_[0].same_shape(planes_[1]) || !planes_[0].same_shape(planes_[2])) {
        throw DimensionMismatchError("color planes must share dimensions");
    }
}

ColorRaster ColorRaster::from_gray(const GrayRaster& gray) {
    return ColorRaster(gray, gray, gray);
}

int IntensityHistogram::non_empty_bins() const noexcept {
    return static_cast<int>(std::count_if(bins.begin(), bins.end(), [](std::uint64_t c) { return c > 0; }));
}

int quantize_intensity(double v) noexcept {
    const int bin = static_cast<int>(std::floor(v * 255.0 + 0.5));
    return std::clamp(bin, 0, kHistogramBins - 1);
}

bool is_valid(const GrayRaster& img) noexcept {
    if (img.empty()) {
        return false;
    }
    return std::all_of(img.values().begin(), img.values().end(),
                       [](double v) { return std::isfinite(v) && v >= 0.0 && v <= 1.0; });
}

bool is_valid(const ColorRaster& img) noexcept {
    return is_valid(img.red()) && is_valid(img.green()) && is_valid(img.blue());
}

bool is_valid(const EdgeMap& map) noexcept {
    if (map.empty()) {
        return false;
    }
    return std::all_of(map.values().begin(), map.values().end(), [](std::uint8_t v) { return v <= 1; });
}

GrayRaster to_grayscale(const ColorRaster& img) {
    GrayRaster out(img.width(), img.height());
    const auto r = img.red().values();
    const auto g = img.green().values();
    const auto b = img.blue().values();
    auto dst = out.values();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] = std::clamp(0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i], 0.0, 1.0);
    }
    return out;
}

IntensityHistogram histogram(const GrayRaster& img) {
    IntensityHistogram h;
    for (double v : img.values()) {
        ++h.bins[static_cast<std::size_t>(quantize_intensity(v))];
    }
    h.total = img.size();
    return h;
}

GrayRaster border_extend(const GrayRaster& img, int radius) {
    if (radius < 0) {
        throw DegenerateInputError("border radius must be non-negative");
    }
    if (radius >= std::min(img.width(), img.height())) {
        throw DegenerateInputError("border radius must be smaller than the raster's shorter side");
    }
    if (radius == 0) {
        return img;
    }
    const int w = img.width();
    const int h = img.height();
    GrayRaster out(w + 2 * radius, h + 2 * radius);
    for (int y = 0; y < out.height(); ++y) {
        const int sy = reflect_index(y - radius, h);
        for (int x = 0; x < out.width(); ++x) {
            out(x, y) = img(reflect_index(x - radius, w), sy);
        }
    }
    return out;
}

void clip_unit(GrayRaster& img) noexcept {
    for (double& v : img.values()) {
        v = std::clamp(v, 0.0, 1.0);
    }
}

double mean(const GrayRaster& img) noexcept {
    double sum = 0.0;
    for (double v : img.values()) {
        sum += v;
    }
    return img.empty() ? 0.0 : sum / static_cast<double>(img.size());
}

std::pair<double, double> min_max(const GrayRaster& img) noexcept {
    const auto [lo, hi] = std::minmax_element(img.values().begin(), img.values().end());
    return {*lo, *hi};
}

std::size_t count_ones(const EdgeMap& map) noexcept {
    return static_cast<std::size_t>(std::count(map.values().begin(), map.values().end(), std::uint8_t{1}));
}

namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ULL;
constexpr std::uint64_t kFnvPrime = 1099511628211ULL;

template <typename T>
std::uint64_t fnv1a(std::span<const T> values, std::uint64_t hash = kFnvOffset) noexcept {
    const auto* bytes = reinterpret_cast<const unsigned char*>(values.data());
    const std::size_t n = values.size_bytes();
    for (std::size_t i = 0; i < n; ++i) {
        hash ^= bytes[i];
        hash *= kFnvPrime;
    }
    return hash;
}

}  // namespace

std::uint64_t checksum(const GrayRaster& img) noexcept { return fnv1a(img.values()); }

std::uint64_t checksum(const ColorRaster& img) noexcept {
    std::uint64_t h = kFnvOffset;
    for (int c = 0; c < 3; ++c) {
        h = fnv1a(img.channel(c).values(), h);
    }
    return h;
}

std::uint64_t checksum(const EdgeMap& map) noexcept { return fnv1a(map.values()); }

}  // namespace speed
