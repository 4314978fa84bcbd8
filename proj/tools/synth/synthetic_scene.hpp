#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "speed/eval.hpp"
#include "speed/pipeline.hpp"
#include "speed/raster.hpp"

namespace speed::synth {

// Procedural stand-in for annotated aerial imagery: textured terrain,
// unlabelled clutter (trees, roads, buildings, field borders), labelled
// objects with DOTA-style quadrilaterals, then haze, exposure and sensor noise.
enum class SceneKind { parking, harbor, rural, airport };

std::string_view to_string(SceneKind kind) noexcept;

struct SceneOptions {
    int width = 320;
    int height = 320;
};

struct Scene {
    SceneKind kind = SceneKind::parking;
    ColorRaster image;
    std::vector<PolygonAnnotation> annotations;
};

// Deterministic for a given seed on a given standard library.
Scene generate_scene(std::uint64_t seed, const SceneOptions& options = {});

// Items are named "scene_0000", "scene_0001", ... with rasterized ground truth.
std::vector<CorpusItem> generate_corpus(std::size_t count, std::uint64_t seed, const SceneOptions& options = {},
                                        const GroundTruthOptions& gt = {});

// Writes <dir>/images/<id>.png and <dir>/labelTxt/<id>.txt in DOTA layout.
void write_corpus(const std::filesystem::path& dir, std::size_t count, std::uint64_t seed,
                  const SceneOptions& options = {});

std::string format_annotations(const std::vector<PolygonAnnotation>& annotations);

}  // namespace speed::synth
