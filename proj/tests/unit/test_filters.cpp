#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "speed/filters.hpp"
#include "test_support.hpp"

using namespace speed;

namespace {

// Per-pixel reference of one explicit Perona-Malik step: each pixel gathers
// c(d)*d from its four neighbours; a missing neighbour contributes nothing.
GrayRaster reference_diffusion_step(const GrayRaster& img, double k, double dt) {
    GrayRaster out = img;
    const int dx[] = {1, -1, 0, 0};
    const int dy[] = {0, 0, 1, -1};
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            double acc = 0.0;
            for (int n = 0; n < 4; ++n) {
                const int nx = x + dx[n];
                const int ny = y + dy[n];
                if (nx < 0 || ny < 0 || nx >= img.width() || ny >= img.height()) {
                    continue;
                }
                const double d = img(nx, ny) - img(x, y);
                const double c = d == 0.0 ? 1.0 : std::exp(-(d / k) * (d / k));
                acc += c * d;
            }
            out(x, y) = img(x, y) + dt * acc;
        }
    }
    return out;
}

double sum(const GrayRaster& img) { return std::accumulate(img.values().begin(), img.values().end(), 0.0); }

GrayRaster from_bins(const std::vector<std::pair<int, int>>& bin_counts, int width) {
    std::vector<double> values;
    for (const auto& [bin, count] : bin_counts) {
        values.insert(values.end(), static_cast<std::size_t>(count), bin / 255.0);
    }
    const int height = static_cast<int>(values.size()) / width;
    values.resize(static_cast<std::size_t>(width * height));
    return GrayRaster(width, height, std::move(values));
}

}  // namespace

// --- white balance --------------------------------------------------------

TEST(WhiteBalance, ConstantColourBecomesMeanGray) {
    const ColorRaster img(GrayRaster(4, 4, 0.2), GrayRaster(4, 4, 0.4), GrayRaster(4, 4, 0.6));
    const auto r = white_balance(img);
    EXPECT_FALSE(r.degenerate);
    for (int c = 0; c < 3; ++c) {
        for (double v : r.image.channel(c).values()) {
            EXPECT_NEAR(v, 0.4, 1e-15);
        }
    }
}

TEST(WhiteBalance, NeutralImageUnchanged) {
    std::mt19937_64 rng(4);
    const GrayRaster g = test::random_gray(rng, 8, 8);
    const auto r = white_balance(ColorRaster::from_gray(g));
    for (int c = 0; c < 3; ++c) {
        EXPECT_EQ(r.image.channel(c), g);
    }
}

TEST(WhiteBalance, EqualizesChannelMeansBeforeClipping) {
    std::mt19937_64 rng(8);
    for (int t = 0; t < 20; ++t) {
        const ColorRaster img = test::random_color(rng, 16, 12);
        const auto gains = gray_world_gains(img);
        const double m0 = mean(img.red()) * gains[0];
        EXPECT_NEAR(mean(img.green()) * gains[1], m0, 1e-12);
        EXPECT_NEAR(mean(img.blue()) * gains[2], m0, 1e-12);
    }
}

TEST(WhiteBalance, ZeroChannelIsDegenerate) {
    const ColorRaster img(GrayRaster(3, 3, 0.5), GrayRaster(3, 3, 0.0), GrayRaster(3, 3, 0.5));
    EXPECT_THROW(gray_world_gains(img), DegenerateInputError);
    const auto r = white_balance(img);
    EXPECT_TRUE(r.degenerate);
    EXPECT_EQ(r.image, img);
}

// --- anisotropic diffusion ------------------------------------------------

TEST(Diffusion, ConstantAndZeroIterationsAreIdentity) {
    const GrayRaster flat(9, 7, 0.3);
    EXPECT_EQ(anisotropic_diffusion(flat, {}), flat);
    std::mt19937_64 rng(1);
    const GrayRaster img = test::random_gray(rng, 9, 7);
    DiffusionParams p;
    p.iterations = 0;
    EXPECT_EQ(anisotropic_diffusion(img, p), img);
}

TEST(Diffusion, MatchesPerPixelReference) {
    std::mt19937_64 rng(2);
    for (double k : {0.02, 0.1, 0.7}) {
        const GrayRaster img = test::random_gray(rng, 13, 11);
        const GrayRaster ours = diffuse_once(img, k, 0.2);
        const GrayRaster ref = reference_diffusion_step(img, k, 0.2);
        for (std::size_t i = 0; i < img.size(); ++i) {
            EXPECT_NEAR(ours.values()[i], ref.values()[i], 1e-14);
        }
    }
}

TEST(Diffusion, StepPreservedWithSmallK) {
    const GrayRaster step(4, 1, std::vector<double>{0, 0, 1, 1});
    DiffusionParams p;
    p.k_mode = KMode::fixed;
    p.k = 0.05;
    const GrayRaster out = anisotropic_diffusion(step, p);
    for (int x = 0; x < 4; ++x) {
        EXPECT_NEAR(out(x, 0), step(x, 0), 1e-3);
    }
}

TEST(Diffusion, LargeKConvergesToMean) {
    const GrayRaster step(4, 1, std::vector<double>{0, 0, 1, 1});
    DiffusionParams p;
    p.k_mode = KMode::fixed;
    p.k = 100.0;
    GrayRaster ref = step;
    for (int i = 0; i < p.iterations; ++i) {
        ref = reference_diffusion_step(ref, p.k, p.time_step);
    }
    const GrayRaster out = anisotropic_diffusion(step, p);
    double before = 0.0;
    double after = 0.0;
    for (int x = 0; x < 4; ++x) {
        EXPECT_NEAR(out(x, 0), ref(x, 0), 1e-12);
        before += std::abs(step(x, 0) - 0.5);
        after += std::abs(out(x, 0) - 0.5);
    }
    EXPECT_LT(after, 0.25 * before);
}

TEST(Diffusion, ConservesMeanAndObeysMaximumPrinciple) {
    std::mt19937_64 rng(3);
    for (int t = 0; t < 30; ++t) {
        const GrayRaster img = test::random_gray(rng, 24, 20);
        const auto [lo, hi] = min_max(img);
        const double k = 0.02 + 0.5 * (t % 5) / 4.0;
        GrayRaster cur = img;
        for (int it = 0; it < 10; ++it) {
            const GrayRaster next = diffuse_once(cur, k, 0.25);
            EXPECT_NEAR(sum(next) / next.size(), sum(cur) / cur.size(), 1e-9);
            const auto [nlo, nhi] = min_max(next);
            EXPECT_GE(nlo, lo - 1e-15);
            EXPECT_LE(nhi, hi + 1e-15);
            cur = next;
        }
    }
}

TEST(Diffusion, ValidationRejectsUnstableStep) {
    DiffusionParams p;
    p.time_step = 0.3;
    EXPECT_THROW(validate(p), ConfigError);
    p = {};
    p.k_mode = KMode::fixed;
    p.k = 0.0;
    EXPECT_THROW(validate(p), ConfigError);
}

TEST(Diffusion, ConductionCurve) {
    EXPECT_EQ(conduction(0.0, 0.1), 1.0);
    EXPECT_NEAR(conduction(0.1, 0.1), std::exp(-1.0), 1e-15);
    EXPECT_NEAR(conduction(-0.2, 0.1), std::exp(-4.0), 1e-15);
}

// --- contrast normalization -------------------------------------------------

TEST(ContrastNormalization, TailIs26Bins) { EXPECT_EQ(skew_tail_bins({}), 26); }

TEST(ContrastNormalization, BalancedMidGrayUnchanged) {
    // 80% mid-gray, 10% in each tail.
    const GrayRaster img = from_bins({{128, 80}, {5, 10}, {250, 10}}, 10);
    const auto r = conditional_contrast_normalization(img, {});
    EXPECT_FALSE(r.applied);
    EXPECT_EQ(r.image, img);
    EXPECT_EQ(r.skew.direction, SkewDirection::none);
}

TEST(ContrastNormalization, ConstantImageUnchanged) {
    const GrayRaster img(6, 6, 0.5);
    const auto r = conditional_contrast_normalization(img, {});
    EXPECT_FALSE(r.applied);
    EXPECT_EQ(r.image, img);
}

TEST(ContrastNormalization, BrightSkewFiresAndStretches) {
    // 90% in the top decile of bins, 1% in the bottom decile, rest mid.
    const GrayRaster img = from_bins({{240, 900}, {10, 10}, {128, 90}}, 25);
    const auto r = conditional_contrast_normalization(img, {});
    ASSERT_TRUE(r.applied);
    EXPECT_EQ(r.skew.direction, SkewDirection::bright);
    EXPECT_EQ(r.skew.upper_mass, 900u);
    EXPECT_EQ(r.skew.lower_mass, 10u);
    EXPECT_DOUBLE_EQ(r.skew.ratio, 90.0);
    const auto [lo, hi] = min_max(r.image);
    EXPECT_EQ(lo, 0.0);
    EXPECT_EQ(hi, 1.0);
}

TEST(ContrastNormalization, DarkSkewFires) {
    const GrayRaster img = from_bins({{3, 500}, {240, 100}, {100, 400}}, 10);
    const auto r = conditional_contrast_normalization(img, {});
    EXPECT_TRUE(r.applied);
    EXPECT_EQ(r.skew.direction, SkewDirection::dark);
    EXPECT_DOUBLE_EQ(r.skew.ratio, 5.0);
}

TEST(ContrastNormalization, RatioAtThresholdDoesNotFire) {
    const GrayRaster img = from_bins({{250, 20}, {2, 10}, {128, 70}}, 10);
    const auto r = conditional_contrast_normalization(img, {});
    EXPECT_DOUBLE_EQ(r.skew.ratio, 2.0);
    EXPECT_FALSE(r.applied);
}

TEST(ContrastNormalization, OneEmptyTailFires) {
    const GrayRaster img = from_bins({{250, 20}, {128, 80}}, 10);
    const auto r = conditional_contrast_normalization(img, {});
    EXPECT_TRUE(std::isinf(r.skew.ratio));
    EXPECT_TRUE(r.applied);
}

TEST(ContrastNormalization, ForceAppliesWithoutSkew) {
    const GrayRaster img = from_bins({{128, 80}, {5, 10}, {250, 10}}, 10);
    const auto r = conditional_contrast_normalization(img, {}, true);
    EXPECT_TRUE(r.applied);
    const auto [lo, hi] = min_max(r.image);
    EXPECT_EQ(lo, 0.0);
    EXPECT_EQ(hi, 1.0);
}

// --- fuzzy histogram hyperbolization ---------------------------------------

TEST(Hyperbolization, TransferCurveValues) {
    EXPECT_EQ(hyperbolize(0.0), 0.0);
    EXPECT_NEAR(hyperbolize(1.0), 1.0, 1e-15);
    EXPECT_NEAR(hyperbolize(0.5), std::expm1(-0.5) / std::expm1(-1.0), 1e-15);
    EXPECT_NEAR(hyperbolize(0.5), 0.6225, 5e-5);
    // Before normalization g_max lands on L-1.
    const double lambda = 255.0 / (std::exp(-1.0) - 1.0);
    EXPECT_NEAR(lambda * (std::exp(-1.0) - 1.0), 255.0, 1e-12);
}

TEST(Hyperbolization, EndpointsAndMonotone) {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 20; ++t) {
        GrayRaster img = test::random_gray(rng, 16, 16);
        for (double& v : img.values()) {
            v = 0.2 + 0.5 * v;
        }
        const GrayRaster out = fuzzy_histogram_hyperbolization(img);
        const auto [lo, hi] = min_max(img);
        for (std::size_t i = 0; i < img.size(); ++i) {
            if (img.values()[i] == lo) {
                EXPECT_NEAR(out.values()[i], 0.0, 1e-12);
            }
            if (img.values()[i] == hi) {
                EXPECT_NEAR(out.values()[i], 1.0, 1e-12);
            }
            for (std::size_t j = 0; j < img.size(); j += 7) {
                if (img.values()[i] < img.values()[j]) {
                    EXPECT_LT(out.values()[i], out.values()[j]);
                }
            }
        }
    }
}

TEST(Hyperbolization, ConstantImageUnchangedAndLevelsChecked) {
    const GrayRaster flat(4, 4, 0.7);
    EXPECT_EQ(fuzzy_histogram_hyperbolization(flat), flat);
    EXPECT_THROW(fuzzy_histogram_hyperbolization(flat, 1), ConfigError);
}

// --- blurs --------------------------------------------------------------------

TEST(MedianBlur, FixesConstantAndRemovesImpulse) {
    const GrayRaster flat(7, 5, 0.4);
    EXPECT_EQ(median_blur(flat), flat);
    GrayRaster dot(7, 7, 0.0);
    dot(3, 3) = 1.0;
    EXPECT_EQ(median_blur(dot), GrayRaster(7, 7, 0.0));
    const GrayRaster one(1, 1, 0.9);
    EXPECT_EQ(median_blur(one), one);
}

TEST(MedianBlur, MatchesSortingReference) {
    std::mt19937_64 rng(10);
    const GrayRaster img = test::random_gray(rng, 9, 6);
    const GrayRaster out = median_blur(img);
    for (int y = 0; y < img.height(); ++y) {
        for (int x = 0; x < img.width(); ++x) {
            std::vector<double> win;
            for (int j = -1; j <= 1; ++j) {
                for (int i = -1; i <= 1; ++i) {
                    win.push_back(img(reflect_index(x + i, img.width()), reflect_index(y + j, img.height())));
                }
            }
            std::sort(win.begin(), win.end());
            EXPECT_EQ(out(x, y), win[4]);
        }
    }
}

TEST(GaussianBlur, KernelRatios) {
    const auto k = gaussian_kernel_3x3();
    EXPECT_NEAR(std::accumulate(k.begin(), k.end(), 0.0), 1.0, 1e-15);
    EXPECT_NEAR(k[1] / k[4], std::exp(-1.0 / 4.5), 1e-15);
    EXPECT_NEAR(k[0] / k[4], std::exp(-2.0 / 4.5), 1e-15);
    EXPECT_EQ(k[0], k[8]);
    EXPECT_EQ(k[3], k[5]);
}

TEST(GaussianBlur, ConstantAndImpulse) {
    const GrayRaster flat(6, 6, 0.37);
    const GrayRaster blurred = gaussian_blur(flat);
    for (double v : blurred.values()) {
        EXPECT_NEAR(v, 0.37, 1e-12);
    }
    GrayRaster dot(7, 7, 0.0);
    dot(3, 3) = 1.0;
    const GrayRaster out = gaussian_blur(dot);
    const auto k = gaussian_kernel_3x3();
    for (int y = 0; y < 7; ++y) {
        for (int x = 0; x < 7; ++x) {
            const bool inside = std::abs(x - 3) <= 1 && std::abs(y - 3) <= 1;
            const double expected = inside ? k[static_cast<std::size_t>((y - 2) * 3 + (x - 2))] : 0.0;
            EXPECT_NEAR(out(x, y), expected, 1e-15);
        }
    }
}

TEST(GaussianBlur, NeverExpandsRange) {
    std::mt19937_64 rng(12);
    for (int t = 0; t < 20; ++t) {
        const GrayRaster img = test::random_gray(rng, 10, 10);
        const auto [lo, hi] = min_max(img);
        const auto [olo, ohi] = min_max(gaussian_blur(img));
        EXPECT_GE(olo, lo);
        EXPECT_LE(ohi, hi);
    }
}

TEST(ConditionalBlur, ConstantNotApplied) {
    const GrayRaster flat(10, 10, 0.5);
    const auto r = conditional_gaussian_blur(flat, {});
    EXPECT_FALSE(r.applied);
    EXPECT_EQ(r.sparse.non_empty_bins, 1);
    EXPECT_EQ(r.sparse.sparse_bins, 0);
    EXPECT_EQ(r.image, flat);
}

TEST(ConditionalBlur, ThirtyOfFortySparseBinsFires) {
    // 10 000 pixels: 30 bins with one pixel each, 10 heavy bins with the rest.
    std::vector<std::pair<int, int>> bins;
    for (int b = 0; b < 30; ++b) {
        bins.emplace_back(b * 5, 1);
    }
    for (int b = 0; b < 10; ++b) {
        bins.emplace_back(160 + b * 8, 997);
    }
    const GrayRaster img = from_bins(bins, 100);
    ASSERT_EQ(img.size(), 10000u);
    const auto r = conditional_gaussian_blur(img, {});
    EXPECT_EQ(r.sparse.non_empty_bins, 40);
    EXPECT_EQ(r.sparse.sparse_bins, 30);
    EXPECT_DOUBLE_EQ(r.sparse.sparse_fraction, 0.75);
    EXPECT_TRUE(r.applied);
    EXPECT_EQ(r.image, gaussian_blur(img));
}

TEST(ConditionalBlur, FourHeavyBinsNotApplied) {
    const GrayRaster img = from_bins({{10, 2500}, {90, 2500}, {170, 2500}, {250, 2500}}, 100);
    const auto r = conditional_gaussian_blur(img, {});
    EXPECT_EQ(r.sparse.sparse_bins, 0);
    EXPECT_FALSE(r.applied);
    EXPECT_EQ(r.image, img);
}

TEST(ConditionalBlur, AllBinsDenominator) {
    std::vector<std::pair<int, int>> bins;
    for (int b = 0; b < 30; ++b) {
        bins.emplace_back(b, 1);
    }
    bins.emplace_back(200, 9970);
    ConditionalTriggerParams p;
    p.sparse_denominator = SparseDenominator::all_bins;
    const auto s = measure_sparse_bins(histogram(from_bins(bins, 100)), p);
    EXPECT_DOUBLE_EQ(s.sparse_fraction, 30.0 / 256.0);
}

TEST(Filters, PreserveUnitRangeAndShape) {
    std::mt19937_64 rng(20);
    for (int t = 0; t < 10; ++t) {
        const GrayRaster img = test::random_scene(rng, 31, 17);
        for (const GrayRaster& out :
             {anisotropic_diffusion(img, {}), conditional_contrast_normalization(img, {}, true).image,
              fuzzy_histogram_hyperbolization(img), median_blur(img), gaussian_blur(img),
              conditional_gaussian_blur(img, {}, {}, true).image}) {
            EXPECT_TRUE(out.same_shape(img));
            EXPECT_TRUE(is_valid(out));
        }
    }
}
