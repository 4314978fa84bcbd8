#include <benchmark/benchmark.h>

#include <random>

#include "speed/canny.hpp"
#include "speed/eval.hpp"
#include "speed/filters.hpp"
#include "speed/pipeline.hpp"

namespace {

speed::GrayRaster noise_image(int n) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(n));
    std::uniform_real_distribution<double> u(0.0, 1.0);
    speed::GrayRaster img(n, n);
    for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
            img(x, y) = 0.5 + 0.3 * ((x / 16 + y / 16) % 2) + 0.1 * (u(rng) - 0.5);
        }
    }
    return img;
}

speed::EdgeMap edge_map(int n, double density) {
    std::mt19937_64 rng(static_cast<std::uint64_t>(n) * 3);
    std::bernoulli_distribution b(density);
    speed::EdgeMap m(n, n);
    for (auto& v : m.values()) {
        v = b(rng) ? 1 : 0;
    }
    return m;
}

template <typename Fn>
void run_filter(benchmark::State& state, Fn fn) {
    const auto img = noise_image(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fn(img));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(img.size()));
}

void BM_Diffusion(benchmark::State& s) {
    run_filter(s, [](const speed::GrayRaster& i) { return speed::anisotropic_diffusion(i, {}); });
}
void BM_Hyperbolization(benchmark::State& s) {
    run_filter(s, [](const speed::GrayRaster& i) { return speed::fuzzy_histogram_hyperbolization(i); });
}
void BM_MedianBlur(benchmark::State& s) {
    run_filter(s, [](const speed::GrayRaster& i) { return speed::median_blur(i); });
}
void BM_GaussianBlur(benchmark::State& s) {
    run_filter(s, [](const speed::GrayRaster& i) { return speed::gaussian_blur(i); });
}
void BM_Canny(benchmark::State& s) {
    run_filter(s, [](const speed::GrayRaster& i) { return speed::canny_detect(i); });
}

void BM_Pipeline(benchmark::State& state) {
    const auto gray = noise_image(static_cast<int>(state.range(0)));
    const auto img = speed::ColorRaster::from_gray(gray);
    for (auto _ : state) {
        benchmark::DoNotOptimize(speed::run_pipeline(img, {}));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(gray.size()));
}

void BM_Ssim(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const auto g = edge_map(n, 0.05);
    const auto d = edge_map(n, 0.1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(speed::score_image(d, g));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(g.size()));
}

}  // namespace

BENCHMARK(BM_Diffusion)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Hyperbolization)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MedianBlur)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GaussianBlur)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Canny)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Ssim)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Pipeline)->Arg(256)->Arg(512)->Arg(1024)->Unit(benchmark::kMillisecond);
BENCHMARK_MAIN();
