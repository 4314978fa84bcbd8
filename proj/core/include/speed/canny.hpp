#pragma once

#include <optional>

#include "speed/raster.hpp"

namespace speed {

enum class AutoThresholdMode { otsu, noise };

struct CannyParams {
    // When both are set they are used as-is; otherwise they are derived per image.
    std::optional<double> low_threshold;
    std::optional<double> high_threshold;
    AutoThresholdMode auto_mode = AutoThresholdMode::otsu;
    // low = low_ratio * high for automatic thresholds.
    double low_ratio = 0.4;
    // high = noise_multiplier * noise_estimate in noise mode.
    double noise_multiplier = 2.5;
};

void validate(const CannyParams& params);

// Robust noise scale: 1.4826 times the median central-difference gradient
// magnitude over the 4-neighbourhood. Zero for constant images.
double noise_estimate(const GrayRaster& img);

// Sobel response scaled by 1/8, so a unit ramp has magnitude 1 per pixel.
struct Gradient {
    ScalarField dx;
    ScalarField dy;
    ScalarField magnitude;
};

Gradient sobel_gradient(const GrayRaster& img);

// Direction sector of a gradient: 0 = horizontal (compare left/right),
// 1 = 45 degrees, 2 = vertical, 3 = 135 degrees.
int gradient_sector(double dx, double dy) noexcept;

// Pixels that are local maxima of magnitude along their quantized gradient
// direction (ties resolved toward the positive side). Stored as magnitude, 0 elsewhere.
ScalarField non_maximum_suppression(const Gradient& grad);

// Otsu split over a 256-bin histogram of the nonzero magnitudes. Zero when
// there are no nonzero magnitudes.
double otsu_threshold(const ScalarField& magnitude);

struct Thresholds {
    double low = 0.0;
    double high = 0.0;
};

Thresholds resolve_thresholds(const GrayRaster& img, const Gradient& grad, const CannyParams& params);

// Keeps suppressed-magnitude pixels >= low that are 8-connected through such
// pixels to one >= high.
EdgeMap hysteresis(const ScalarField& suppressed, const Thresholds& thresholds);

struct CannyResult {
    EdgeMap edges;
    Thresholds thresholds;
};

// Requires width, height >= 3.
CannyResult canny(const GrayRaster& img, const CannyParams& params = {});

inline EdgeMap canny_detect(const GrayRaster& img, const CannyParams& params = {}) {
    return canny(img, params).edges;
}

}  // namespace speed
