#include "synthetic_scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>

#include "speed/image_io.hpp"

namespace speed::synth {

std::string_view to_string(SceneKind kind) noexcept {
    switch (kind) {
        case SceneKind::parking:
            return "parking";
        case SceneKind::harbor:
            return "harbor";
        case SceneKind::rural:
            return "rural";
        case SceneKind::airport:
            return "airport";
    }
    return "?";
}

namespace {

using Rgb = std::array<double, 3>;
using Rng = std::mt19937_64;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }
bool chance(Rng& rng, double p) { return uniform(rng, 0.0, 1.0) < p; }

Rgb jitter(Rng& rng, const Rgb& c, double amount) {
    return {std::clamp(c[0] + uniform(rng, -amount, amount), 0.0, 1.0),
            std::clamp(c[1] + uniform(rng, -amount, amount), 0.0, 1.0),
            std::clamp(c[2] + uniform(rng, -amount, amount), 0.0, 1.0)};
}

// Smooth lattice noise in [-1, 1].
class ValueNoise {
public:
    ValueNoise(Rng& rng, int width, int height, double cell) : cell_(cell) {
        cols_ = static_cast<int>(std::ceil(width / cell)) + 2;
        rows_ = static_cast<int>(std::ceil(height / cell)) + 2;
        lattice_.resize(static_cast<std::size_t>(cols_ * rows_));
        for (double& v : lattice_) {
            v = uniform(rng, -1.0, 1.0);
        }
    }

    double operator()(double x, double y) const {
        const double gx = x / cell_;
        const double gy = y / cell_;
        const int ix = static_cast<int>(gx);
        const int iy = static_cast<int>(gy);
        const double fx = smooth(gx - ix);
        const double fy = smooth(gy - iy);
        const double a = at(ix, iy) + (at(ix + 1, iy) - at(ix, iy)) * fx;
        const double b = at(ix, iy + 1) + (at(ix + 1, iy + 1) - at(ix, iy + 1)) * fx;
        return a + (b - a) * fy;
    }

private:
    static double smooth(double t) { return t * t * (3.0 - 2.0 * t); }
    double at(int x, int y) const { return lattice_[static_cast<std::size_t>(y * cols_ + x)]; }

    double cell_;
    int cols_ = 0;
    int rows_ = 0;
    std::vector<double> lattice_;
};

struct Quad {
    std::array<Point, 4> corners;
};

Quad oriented_rect(double cx, double cy, double length, double width, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const double hl = length / 2.0;
    const double hw = width / 2.0;
    Quad q;
    const double ux[4] = {-hl, hl, hl, -hl};
    const double uy[4] = {-hw, -hw, hw, hw};
    for (int i = 0; i < 4; ++i) {
        q.corners[static_cast<std::size_t>(i)] = {cx + ux[i] * c - uy[i] * s, cy + ux[i] * s + uy[i] * c};
    }
    return q;
}

bool inside_convex(const Quad& q, double x, double y) {
    bool pos = false;
    bool neg = false;
    for (std::size_t i = 0; i < 4; ++i) {
        const Point& a = q.corners[i];
        const Point& b = q.corners[(i + 1) % 4];
        const double cross = (b.x - a.x) * (y - a.y) - (b.y - a.y) * (x - a.x);
        pos = pos || cross > 0.0;
        neg = neg || cross < 0.0;
    }
    return !(pos && neg);
}

class Canvas {
public:
    Canvas(int w, int h) : image(w, h) {}

    int width() const { return image.width(); }
    int height() const { return image.height(); }

    void blend(int x, int y, const Rgb& c, double alpha) {
        if (x < 0 || y < 0 || x >= width() || y >= height() || alpha <= 0.0) {
            return;
        }
        for (int ch = 0; ch < 3; ++ch) {
            double& v = image.channel(ch)(x, y);
            v += (c[static_cast<std::size_t>(ch)] - v) * alpha;
        }
    }

    // Anti-aliased fill using 4x4 supersampling.
    template <typename Inside>
    void fill(double x0, double y0, double x1, double y1, const Rgb& c, double opacity, Inside inside) {
        const int ix0 = std::max(0, static_cast<int>(std::floor(x0)));
        const int iy0 = std::max(0, static_cast<int>(std::floor(y0)));
        const int ix1 = std::min(width() - 1, static_cast<int>(std::ceil(x1)));
        const int iy1 = std::min(height() - 1, static_cast<int>(std::ceil(y1)));
        for (int y = iy0; y <= iy1; ++y) {
            for (int x = ix0; x <= ix1; ++x) {
                int hits = 0;
                for (int sy = 0; sy < 4; ++sy) {
                    for (int sx = 0; sx < 4; ++sx) {
                        hits += inside(x + (sx + 0.5) / 4.0, y + (sy + 0.5) / 4.0) ? 1 : 0;
                    }
                }
                blend(x, y, c, opacity * hits / 16.0);
            }
        }
    }

    void fill_quad(const Quad& q, const Rgb& c, double opacity = 1.0) {
        double x0 = 1e9, y0 = 1e9, x1 = -1e9, y1 = -1e9;
        for (const auto& p : q.corners) {
            x0 = std::min(x0, p.x);
            y0 = std::min(y0, p.y);
            x1 = std::max(x1, p.x);
            y1 = std::max(y1, p.y);
        }
        fill(x0, y0, x1, y1, c, opacity, [&](double x, double y) { return inside_convex(q, x, y); });
    }

    void fill_disc(double cx, double cy, double r, const Rgb& c, double opacity = 1.0) {
        fill(cx - r, cy - r, cx + r, cy + r, c, opacity,
             [&](double x, double y) { return (x - cx) * (x - cx) + (y - cy) * (y - cy) <= r * r; });
    }

    ColorRaster image;
};

// Base colour modulated by low-frequency patches and fine-grained texture.
void paint_terrain(Canvas& cv, Rng& rng, const Rgb& base, double patch_amp, double grain_amp, double grain_cell) {
    const ValueNoise patches(rng, cv.width(), cv.height(), uniform(rng, 40.0, 90.0));
    const ValueNoise detail(rng, cv.width(), cv.height(), uniform(rng, 10.0, 20.0));
    const ValueNoise grain(rng, cv.width(), cv.height(), grain_cell);
    std::normal_distribution<double> speckle(0.0, grain_amp * 0.5);
    const Rgb tint = jitter(rng, {0.0, 0.0, 0.0}, 0.04);
    for (int y = 0; y < cv.height(); ++y) {
        for (int x = 0; x < cv.width(); ++x) {
            const double p = patch_amp * patches(x, y) + 0.4 * patch_amp * detail(x, y);
            const double g = grain_amp * grain(x, y) + speckle(rng);
            for (int ch = 0; ch < 3; ++ch) {
                const double v = base[static_cast<std::size_t>(ch)] * (1.0 + p) + g + tint[static_cast<std::size_t>(ch)] * p;
                cv.image.channel(ch)(x, y) = std::clamp(v, 0.0, 1.0);
            }
        }
    }
}

void paint_trees(Canvas& cv, Rng& rng, int count) {
    for (int i = 0; i < count; ++i) {
        const double cx = uniform(rng, 0, cv.width());
        const double cy = uniform(rng, 0, cv.height());
        const int blobs = uniform_int(rng, 1, 5);
        const Rgb leaf = jitter(rng, {0.12, 0.22, 0.10}, 0.05);
        for (int b = 0; b < blobs; ++b) {
            const double r = uniform(rng, 1.5, 4.5);
            cv.fill_disc(cx + uniform(rng, -5, 5) + 1.5, cy + uniform(rng, -5, 5) + 1.5, r, {0.03, 0.04, 0.03}, 0.4);
            cv.fill_disc(cx + uniform(rng, -5, 5), cy + uniform(rng, -5, 5), r, jitter(rng, leaf, 0.03), 0.9);
        }
    }
}

void paint_road(Canvas& cv, Rng& rng, const Rgb& color, double width) {
    const double angle = uniform(rng, 0.0, std::numbers::pi);
    const double cx = uniform(rng, 0, cv.width());
    const double cy = uniform(rng, 0, cv.height());
    const double len = 3.0 * std::max(cv.width(), cv.height());
    cv.fill_quad(oriented_rect(cx, cy, len, width, angle), color, 0.95);
    if (chance(rng, 0.6)) {
        // Dashed centre line.
        for (double t = -len / 2; t < len / 2; t += 14.0) {
            cv.fill_quad(oriented_rect(cx + t * std::cos(angle), cy + t * std::sin(angle), 6.0, 1.0, angle),
                         {0.85, 0.85, 0.8}, 0.7);
        }
    }
}

void paint_building(Canvas& cv, Rng& rng) {
    const double cx = uniform(rng, 0, cv.width());
    const double cy = uniform(rng, 0, cv.height());
    const double l = uniform(rng, 18, 50);
    const double w = uniform(rng, 14, 36);
    const double a = uniform(rng, 0.0, std::numbers::pi);
    const double shadow = uniform(rng, 2.0, 5.0);
    cv.fill_quad(oriented_rect(cx + shadow, cy + shadow, l, w, a), {0.05, 0.05, 0.06}, 0.6);
    const Rgb roof = jitter(rng, {0.55, 0.5, 0.48}, 0.2);
    cv.fill_quad(oriented_rect(cx, cy, l, w, a), roof);
    if (chance(rng, 0.5)) {
        cv.fill_quad(oriented_rect(cx, cy, l * 0.9, w * 0.08, a), jitter(rng, roof, 0.1));
    }
}

struct Placed {
    double cx;
    double cy;
    double radius;
};

bool overlaps(const std::vector<Placed>& placed, double cx, double cy, double r) {
    return std::any_of(placed.begin(), placed.end(), [&](const Placed& p) {
        return std::hypot(p.cx - cx, p.cy - cy) < p.radius + r + 3.0;
    });
}

PolygonAnnotation make_annotation(const Quad& q, const std::string& category, bool difficult) {
    PolygonAnnotation ann;
    for (const auto& c : q.corners) {
        ann.vertices.push_back({std::round(c.x * 10.0) / 10.0, std::round(c.y * 10.0) / 10.0});
    }
    ann.category = category;
    ann.difficult = difficult;
    return ann;
}

bool inside_frame(const Quad& q, int w, int h) {
    return std::all_of(q.corners.begin(), q.corners.end(),
                       [&](const Point& p) { return p.x >= 1 && p.y >= 1 && p.x <= w - 2 && p.y <= h - 2; });
}

// Labelled object: a body in `color` against local surroundings, optional shadow and markings.
struct ObjectStyle {
    std::string category;
    double min_length;
    double max_length;
    double min_aspect;
    double max_aspect;
};

void place_objects(Canvas& cv, Rng& rng, Scene& scene, std::vector<Placed>& placed, const ObjectStyle& style,
                   int count, const std::vector<Rgb>& palette, double palette_jitter,
                   const std::function<bool(double, double)>& allowed, double lot_angle = -1.0) {
    for (int i = 0, attempts = 0; i < count && attempts < count * 30; ++attempts) {
        const double l = uniform(rng, style.min_length, style.max_length);
        const double w = l / uniform(rng, style.min_aspect, style.max_aspect);
        const double cx = uniform(rng, 0, cv.width());
        const double cy = uniform(rng, 0, cv.height());
        const double a = lot_angle >= 0.0 ? lot_angle + uniform(rng, -0.08, 0.08) : uniform(rng, 0.0, std::numbers::pi);
        const Quad q = oriented_rect(cx, cy, l, w, a);
        if (!inside_frame(q, cv.width(), cv.height()) || overlaps(placed, cx, cy, l / 2) || !allowed(cx, cy)) {
            continue;
        }
        ++i;
        placed.push_back({cx, cy, l / 2});
        const Rgb body = jitter(rng, palette[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(palette.size()) - 1))],
                                palette_jitter);
        const double shadow = std::max(1.0, w * 0.25);
        cv.fill_quad(oriented_rect(cx + shadow, cy + shadow * 0.7, l, w, a), {0.04, 0.04, 0.05}, 0.45);
        cv.fill_quad(q, body);
        if (style.category == "small-vehicle" || style.category == "large-vehicle") {
            // Windshield.
            const double off = l * 0.18;
            cv.fill_quad(oriented_rect(cx + off * std::cos(a), cy + off * std::sin(a), l * 0.18, w * 0.8, a),
                         {0.08, 0.09, 0.1}, 0.8);
        } else if (style.category == "tennis-court") {
            cv.fill_quad(oriented_rect(cx, cy, 1.0, w * 0.95, a), {0.92, 0.92, 0.9}, 0.8);
            cv.fill_quad(oriented_rect(cx, cy, l * 0.8, 1.0, a), {0.92, 0.92, 0.9}, 0.6);
        } else if (style.category == "ship") {
            cv.fill_quad(oriented_rect(cx + l * 0.2 * std::cos(a), cy + l * 0.2 * std::sin(a), l * 0.25, w * 0.6, a),
                         jitter(rng, body, 0.15));
        } else if (style.category == "plane") {
            // Wings across the fuselage; the label stays the body box.
            cv.fill_quad(oriented_rect(cx, cy, w * 0.9, l * 0.75, a), body, 0.9);
        }
        scene.annotations.push_back(make_annotation(q, style.category, chance(rng, 0.08)));
    }
}

void add_field_borders(Canvas& cv, Rng& rng) {
    // Straight, unlabelled boundaries between crop patches.
    const int n = uniform_int(rng, 2, 5);
    for (int i = 0; i < n; ++i) {
        const double angle = uniform(rng, 0.0, std::numbers::pi);
        const double c = std::cos(angle);
        const double s = std::sin(angle);
        const double offset = uniform(rng, -0.3, 0.3) * cv.width();
        const double shift = uniform(rng, -0.06, 0.06);
        for (int y = 0; y < cv.height(); ++y) {
            for (int x = 0; x < cv.width(); ++x) {
                const double d = (x - cv.width() / 2.0) * c + (y - cv.height() / 2.0) * s - offset;
                if (d > 0) {
                    for (int ch = 0; ch < 3; ++ch) {
                        double& v = cv.image.channel(ch)(x, y);
                        v = std::clamp(v + shift * (ch == 1 ? 1.2 : 0.8), 0.0, 1.0);
                    }
                }
            }
        }
    }
}

void generate_parking(Canvas& cv, Rng& rng, Scene& scene) {
    const Rgb asphalt = jitter(rng, {0.36, 0.36, 0.38}, 0.08);
    paint_terrain(cv, rng, asphalt, 0.12, 0.05, uniform(rng, 1.5, 3.0));
    for (int i = uniform_int(rng, 0, 2); i > 0; --i) {
        paint_road(cv, rng, jitter(rng, {0.25, 0.25, 0.27}, 0.05), uniform(rng, 10, 20));
    }
    for (int i = uniform_int(rng, 1, 3); i > 0; --i) {
        paint_building(cv, rng);
    }
    paint_trees(cv, rng, uniform_int(rng, 5, 30));
    std::vector<Placed> placed;
    const std::vector<Rgb> palette = {{0.85, 0.85, 0.85}, {0.1, 0.1, 0.12}, {0.6, 0.1, 0.1},   {0.2, 0.3, 0.55},
                                      {0.5, 0.5, 0.52},   {0.7, 0.7, 0.65}, {0.35, 0.35, 0.37}};
    const double lot = uniform(rng, 0.0, std::numbers::pi);
    place_objects(cv, rng, scene, placed, {"small-vehicle", 9, 14, 1.8, 2.4}, uniform_int(rng, 6, 20), palette, 0.05,
                  [](double, double) { return true; }, lot);
    place_objects(cv, rng, scene, placed, {"large-vehicle", 18, 30, 2.5, 3.5}, uniform_int(rng, 0, 4), palette, 0.05,
                  [](double, double) { return true; }, lot);
}

void generate_harbor(Canvas& cv, Rng& rng, Scene& scene) {
    const Rgb land = jitter(rng, {0.45, 0.42, 0.36}, 0.08);
    paint_terrain(cv, rng, land, 0.15, 0.06, uniform(rng, 1.5, 3.0));
    paint_trees(cv, rng, uniform_int(rng, 0, 15));
    // Water covers the side of a wavy shoreline.
    const double angle = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    const double offset = uniform(rng, -0.25, 0.15) * cv.width();
    const ValueNoise shore(rng, cv.width(), cv.height(), 35.0);
    const ValueNoise ripple(rng, cv.width(), cv.height(), 3.0);
    const Rgb water = jitter(rng, {0.07, 0.12, 0.17}, 0.04);
    const auto is_water = [&](double x, double y) {
        const double d = (x - cv.width() / 2.0) * c + (y - cv.height() / 2.0) * s - offset + 12.0 * shore(x, y);
        return d > 0.0;
    };
    for (int y = 0; y < cv.height(); ++y) {
        for (int x = 0; x < cv.width(); ++x) {
            if (is_water(x, y)) {
                const double r = 0.012 * ripple(x, y);
                for (int ch = 0; ch < 3; ++ch) {
                    cv.image.channel(ch)(x, y) = std::clamp(water[static_cast<std::size_t>(ch)] + r, 0.0, 1.0);
                }
            }
        }
    }
    std::vector<Placed> placed;
    const std::vector<Rgb> hulls = {{0.75, 0.75, 0.75}, {0.55, 0.55, 0.6}, {0.35, 0.3, 0.3}, {0.6, 0.25, 0.2},
                                    {0.25, 0.28, 0.33}};
    place_objects(cv, rng, scene, placed, {"ship", 16, 45, 3.0, 5.0}, uniform_int(rng, 3, 12), hulls, 0.06,
                  [&](double x, double y) { return is_water(x, y); });
    place_objects(cv, rng, scene, placed, {"small-vehicle", 9, 13, 1.8, 2.4}, uniform_int(rng, 0, 6),
                  {{0.8, 0.8, 0.8}, {0.15, 0.15, 0.17}, {0.5, 0.5, 0.5}}, 0.05,
                  [&](double x, double y) { return !is_water(x, y); });
}

void generate_rural(Canvas& cv, Rng& rng, Scene& scene) {
    const Rgb grass = jitter(rng, {0.32, 0.40, 0.22}, 0.08);
    paint_terrain(cv, rng, grass, 0.2, 0.08, uniform(rng, 1.2, 2.5));
    add_field_borders(cv, rng);
    if (chance(rng, 0.5)) {
        paint_road(cv, rng, jitter(rng, {0.55, 0.5, 0.45}, 0.08), uniform(rng, 6, 12));
    }
    paint_trees(cv, rng, uniform_int(rng, 10, 45));
    std::vector<Placed> placed;
    place_objects(cv, rng, scene, placed, {"tennis-court", 30, 50, 1.8, 2.2}, uniform_int(rng, 0, 3),
                  {{0.25, 0.45, 0.3}, {0.3, 0.35, 0.55}, {0.55, 0.3, 0.25}}, 0.05, [](double, double) { return true; });
    place_objects(cv, rng, scene, placed, {"swimming-pool", 12, 24, 1.3, 2.0}, uniform_int(rng, 1, 6),
                  {{0.3, 0.55, 0.7}, {0.35, 0.6, 0.65}}, 0.06, [](double, double) { return true; });
    place_objects(cv, rng, scene, placed, {"small-vehicle", 9, 13, 1.8, 2.4}, uniform_int(rng, 0, 6),
                  {{0.8, 0.8, 0.8}, {0.15, 0.15, 0.17}, {0.5, 0.2, 0.2}}, 0.05, [](double, double) { return true; });
}

void generate_airport(Canvas& cv, Rng& rng, Scene& scene) {
    const Rgb concrete = jitter(rng, {0.62, 0.6, 0.57}, 0.08);
    paint_terrain(cv, rng, concrete, 0.08, 0.04, uniform(rng, 2.0, 4.0));
    for (int i = uniform_int(rng, 1, 2); i > 0; --i) {
        paint_road(cv, rng, jitter(rng, {0.45, 0.45, 0.45}, 0.05), uniform(rng, 20, 40));
    }
    std::vector<Placed> placed;
    place_objects(cv, rng, scene, placed, {"plane", 30, 60, 4.0, 6.0}, uniform_int(rng, 2, 6),
                  {{0.9, 0.9, 0.92}, {0.8, 0.82, 0.85}, {0.7, 0.7, 0.72}}, 0.04, [](double, double) { return true; });
    place_objects(cv, rng, scene, placed, {"large-vehicle", 14, 24, 2.2, 3.0}, uniform_int(rng, 0, 6),
                  {{0.9, 0.85, 0.3}, {0.2, 0.2, 0.22}, {0.85, 0.85, 0.85}}, 0.05, [](double, double) { return true; });
}

// Coloured haze, exposure curve and sensor noise, then 8-bit quantization.
void apply_atmosphere(Canvas& cv, Rng& rng) {
    const double haze = chance(rng, 0.7) ? uniform(rng, 0.05, 0.4) : 0.0;
    const Rgb haze_color = jitter(rng, {0.7, 0.72, 0.78}, 0.12);
    const Rgb cast = {uniform(rng, 0.8, 1.15), uniform(rng, 0.85, 1.1), uniform(rng, 0.8, 1.2)};
    const double gamma = std::exp(uniform(rng, -0.45, 0.45));
    const double gain = uniform(rng, 0.75, 1.25);
    std::normal_distribution<double> noise(0.0, uniform(rng, 0.004, 0.025));
    for (int y = 0; y < cv.height(); ++y) {
        for (int x = 0; x < cv.width(); ++x) {
            for (int ch = 0; ch < 3; ++ch) {
                const auto c = static_cast<std::size_t>(ch);
                double v = cv.image.channel(ch)(x, y);
                v = v * (1.0 - haze) + haze_color[c] * haze;
                v = std::pow(std::clamp(v * cast[c] * gain, 0.0, 1.0), gamma);
                v = std::clamp(v + noise(rng), 0.0, 1.0);
                cv.image.channel(ch)(x, y) = std::floor(v * 255.0 + 0.5) / 255.0;
            }
        }
    }
}

}  // namespace

Scene generate_scene(std::uint64_t seed, const SceneOptions& options) {
    Rng rng(seed);
    Scene scene;
    scene.kind = static_cast<SceneKind>(uniform_int(rng, 0, 3));
    Canvas cv(options.width, options.height);
    switch (scene.kind) {
        case SceneKind::parking:
            generate_parking(cv, rng, scene);
            break;
        case SceneKind::harbor:
            generate_harbor(cv, rng, scene);
            break;
        case SceneKind::rural:
            generate_rural(cv, rng, scene);
            break;
        case SceneKind::airport:
            generate_airport(cv, rng, scene);
            break;
    }
    apply_atmosphere(cv, rng);
    scene.image = std::move(cv.image);
    return scene;
}

namespace {

std::string scene_id(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "scene_%04zu", i);
    return buf;
}

}  // namespace

std::vector<CorpusItem> generate_corpus(std::size_t count, std::uint64_t seed, const SceneOptions& options,
                                        const GroundTruthOptions& gt) {
    std::vector<CorpusItem> items;
    items.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        Scene s = generate_scene(seed + i * 7919, options);
        EdgeMap truth = rasterize_ground_truth(s.annotations, options.width, options.height, gt);
        items.push_back({scene_id(i), std::move(s.image), std::move(truth)});
    }
    return items;
}

std::string format_annotations(const std::vector<PolygonAnnotation>& annotations) {
    std::ostringstream out;
    out << "imagesource:synthetic\n";
    out << "gsd:null\n";
    for (const auto& a : annotations) {
        for (const auto& p : a.vertices) {
            out << p.x << ' ' << p.y << ' ';
        }
        out << a.category << ' ' << (a.difficult ? 1 : 0) << '\n';
    }
    return out.str();
}

void write_corpus(const std::filesystem::path& dir, std::size_t count, std::uint64_t seed,
                  const SceneOptions& options) {
    std::filesystem::create_directories(dir / "images");
    std::filesystem::create_directories(dir / "labelTxt");
    for (std::size_t i = 0; i < count; ++i) {
        const Scene s = generate_scene(seed + i * 7919, options);
        const std::string id = scene_id(i);
        io::save(dir / "images" / (id + ".png"), s.image);
        std::ofstream labels(dir / "labelTxt" / (id + ".txt"));
        if (!labels) {
            throw IoError("cannot write labels for " + id);
        }
        labels << format_annotations(s.annotations);
    }
}

}  // namespace speed::synth
