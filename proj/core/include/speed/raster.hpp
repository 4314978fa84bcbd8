#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "speed/error.hpp"

namespace speed {

// Dense row-major 2D grid. The tag parameter keeps rasters with different
// value domains (intensities, SSIM scores, binary edges) from mixing.
template <typename T, typename Tag>
class Grid {
public:
    using value_type = T;

    Grid() = default;

    Grid(int width, int height, T fill = T{}) : width_(width), height_(height) {
        if (width < 1 || height < 1) {
            throw DegenerateInputError("raster dimensions must be at least 1x1");
        }
        data_.assign(static_cast<std::size_t>(width) * static_cast<std::size_t>(height), fill);
    }

    Grid(int width, int height, std::vector<T> values) : width_(width), height_(height), data_(std::move(values)) {
        if (width < 1 || height < 1) {
            throw DegenerateInputError("raster dimensions must be at least 1x1");
        }
        if (data_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
            throw DimensionMismatchError("value count does not match raster dimensions");
        }
    }

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    T operator()(int x, int y) const noexcept { return data_[index(x, y)]; }
    T& operator()(int x, int y) noexcept { return data_[index(x, y)]; }

    std::span<const T> values() const noexcept { return data_; }
    std::span<T> values() noexcept { return data_; }

    std::span<const T> row(int y) const noexcept {
        return std::span<const T>(data_).subspan(static_cast<std::size_t>(y) * width_, width_);
    }
    std::span<T> row(int y) noexcept {
        return std::span<T>(data_).subspan(static_cast<std::size_t>(y) * width_, width_);
    }

    bool same_shape(const auto& other) const noexcept {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const Grid&, const Grid&) = default;

private:
    std::size_t index(int x, int y) const noexcept {
        return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
    }

    int width_ = 0;
    int height_ = 0;
    std::vector<T> data_;
};

struct GrayTag {};
struct EdgeTag {};
struct SsimTag {};
struct FieldTag {};

// Single-channel intensities in [0,1].
using GrayRaster = Grid<double, GrayTag>;
// Binary map; every value is 0 or 1.
using EdgeMap = Grid<std::uint8_t, EdgeTag>;
// Per-pixel SSIM scores in [-1,1].
using SsimMap = Grid<double, SsimTag>;
// Unbounded real-valued field (gradients, magnitudes).
using ScalarField = Grid<double, FieldTag>;

// Three equally sized intensity planes (red, green, blue) in [0,1].
class ColorRaster {
public:
    ColorRaster() = default;
    ColorRaster(int width, int height);
    ColorRaster(GrayRaster red, GrayRaster green, GrayRaster blue);

    int width() const noexcept { return planes_[0].width(); }
    int height() const noexcept { return planes_[0].height(); }

    const GrayRaster& channel(int c) const { return planes_.at(static_cast<std::size_t>(c)); }
    GrayRaster& channel(int c) { return planes_.at(static_cast<std::size_t>(c)); }

    const GrayRaster& red() const noexcept { return planes_[0]; }
    const GrayRaster& green() const noexcept { return planes_[1]; }
    const GrayRaster& blue() const noexcept { return planes_[2]; }

    // Replicates a gray raster into all three planes.
    static ColorRaster from_gray(const GrayRaster& gray);

    friend bool operator==(const ColorRaster&, const ColorRaster&) = default;

private:
    std::array<GrayRaster, 3> planes_;
};

inline constexpr int kHistogramBins = 256;

struct IntensityHistogram {
    std::array<std::uint64_t, kHistogramBins> bins{};
    std::uint64_t total = 0;

    int non_empty_bins() const noexcept;
};

// Quantizes an intensity in [0,1] to its 8-bit bin: floor(v*255 + 0.5).
int quantize_intensity(double v) noexcept;

bool is_valid(const GrayRaster& img) noexcept;
bool is_valid(const ColorRaster& img) noexcept;
bool is_valid(const EdgeMap& map) noexcept;

// BT.601 luminance.
GrayRaster to_grayscale(const ColorRaster& img);

IntensityHistogram histogram(const GrayRaster& img);

// Mirror index into [0, n) without repeating the edge sample (dcb|abcd|cba).
// Periodic for offsets larger than n, so it is defined for every n >= 1.
inline int reflect_index(int i, int n) noexcept {
    if (n == 1) {
        return 0;
    }
    const int period = 2 * (n - 1);
    i %= period;
    if (i < 0) {
        i += period;
    }
    return i < n ? i : period - i;
}

// Reflect-pads by `radius` on all sides. Throws DegenerateInputError when
// radius >= min(width, height).
GrayRaster border_extend(const GrayRaster& img, int radius);

// Clamps every value into [0,1].
void clip_unit(GrayRaster& img) noexcept;

double mean(const GrayRaster& img) noexcept;
std::pair<double, double> min_max(const GrayRaster& img) noexcept;
std::size_t count_ones(const EdgeMap& map) noexcept;

// FNV-1a over the raw value bytes; used for trace checksums.
std::uint64_t checksum(const GrayRaster& img) noexcept;
std::uint64_t checksum(const ColorRaster& img) noexcept;
std::uint64_t checksum(const EdgeMap& map) noexcept;

}  // namespace speed
