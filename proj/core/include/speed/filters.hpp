#pragma once

#include <array>

#include "speed/raster.hpp"

namespace speed {

enum class KMode { fixed, noise_estimate };

// Explicit 4-neighbour Perona-Malik diffusion.
struct DiffusionParams {
    int iterations = 10;
    // Stable for the 4-neighbour explicit scheme up to 0.25.
    double time_step = 0.25;
    // Edge-stopping scale in intensity-difference units; used when k_mode is fixed.
    double k = 0.05;
    KMode k_mode = KMode::noise_estimate;
};

enum class ShiftMode { additive, multiplicative };
enum class SparseDenominator { non_empty_bins, all_bins };

// Thresholds for the two histogram-triggered stages.
struct ConditionalTriggerParams {
    // Fraction of the 256 bins that count as the lowermost/uppermost tail.
    double skew_tail_fraction = 0.10;
    double skew_ratio_threshold = 2.0;
    double shift_factor = 0.20;
    ShiftMode shift_mode = ShiftMode::additive;
    // A non-empty bin is sparse when it holds at most this fraction of all pixels.
    double sparse_bin_fraction = 0.0001;
    // The secondary blur fires when more than this fraction of bins is sparse.
    double sparse_bin_trigger = 0.10;
    SparseDenominator sparse_denominator = SparseDenominator::non_empty_bins;
};

struct GaussianParams {
    double sigma = 1.5;
};

void validate(const DiffusionParams& params);
void validate(const ConditionalTriggerParams& params);
void validate(const GaussianParams& params);

// --- white balance --------------------------------------------------------

struct WhiteBalanceResult {
    ColorRaster image;
    std::array<double, 3> gains{1.0, 1.0, 1.0};
    // Set when some channel has zero mean; the image is returned unchanged.
    bool degenerate = false;
};

// Gray-world gains: mean of channel means divided by each channel mean.
// Throws DegenerateInputError when a channel mean is zero.
std::array<double, 3> gray_world_gains(const ColorRaster& img);

WhiteBalanceResult white_balance(const ColorRaster& img);

// --- anisotropic diffusion ------------------------------------------------

// Edge-stopping scale actually used for `img` under `params`.
double resolve_diffusion_k(const GrayRaster& img, const DiffusionParams& params);

// Conduction coefficient exp(-(|d|/k)^2). Zero for any nonzero difference when k == 0.
double conduction(double difference, double k) noexcept;

// One explicit update with zero-flux borders. Not clipped.
GrayRaster diffuse_once(const GrayRaster& img, double k, double time_step);

// Throws NumericInstabilityError when a non-finite value appears.
GrayRaster anisotropic_diffusion(const GrayRaster& img, const DiffusionParams& params);

// --- conditional contrast normalization ----------------------------------

enum class SkewDirection { none, bright, dark };

struct SkewStatistics {
    std::uint64_t upper_mass = 0;
    std::uint64_t lower_mass = 0;
    // upper/lower (or lower/upper for dark skew); infinite when one side is empty.
    double ratio = 0.0;
    SkewDirection direction = SkewDirection::none;
};

int skew_tail_bins(const ConditionalTriggerParams& params) noexcept;
SkewStatistics measure_skew(const IntensityHistogram& hist, const ConditionalTriggerParams& params);

struct ContrastResult {
    GrayRaster image;
    bool applied = false;
    SkewStatistics skew;
};

// Shifts a skewed image away from its heavy side and stretches it back to
// [0,1]. With force set the step runs even when no skew is detected.
ContrastResult conditional_contrast_normalization(const GrayRaster& img, const ConditionalTriggerParams& params,
                                                  bool force = false);

// --- fuzzy histogram hyperbolization -------------------------------------

// Membership-based exponential remap; g_min -> 0, g_max -> 1. Constant
// images come back unchanged.
GrayRaster fuzzy_histogram_hyperbolization(const GrayRaster& img, int levels = 256);

// Transfer curve for a membership value in [0,1].
double hyperbolize(double membership, int levels = 256) noexcept;

// --- blurs ----------------------------------------------------------------

GrayRaster median_blur(const GrayRaster& img);

// Normalized 3x3 kernel, row-major.
std::array<double, 9> gaussian_kernel_3x3(const GaussianParams& params = {});

GrayRaster gaussian_blur(const GrayRaster& img, const GaussianParams& params = {});

struct SparseBinStatistics {
    int non_empty_bins = 0;
    int sparse_bins = 0;
    // sparse_bins divided by the configured denominator.
    double sparse_fraction = 0.0;
};

SparseBinStatistics measure_sparse_bins(const IntensityHistogram& hist, const ConditionalTriggerParams& params);

struct ConditionalBlurResult {
    GrayRaster image;
    bool applied = false;
    SparseBinStatistics sparse;
};

ConditionalBlurResult conditional_gaussian_blur(const GrayRaster& img, const ConditionalTriggerParams& params,
                                                const GaussianParams& gaussian = {}, bool force = false);

}  // namespace speed
