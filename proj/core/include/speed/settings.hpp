#pragma once

#include <filesystem>
#include <string>

#include "speed/eval.hpp"
#include "speed/pipeline.hpp"

namespace speed {

struct EvaluationSettings {
    SsimParams ssim;
    GroundTruthOptions ground_truth;
};

// Everything a run reads from its YAML config file.
struct Settings {
    PipelineConfig pipeline;
    EvaluationSettings evaluation;
};

// Missing keys keep their defaults; unknown keys and malformed values raise ConfigError.
Settings parse_settings(const std::string& yaml);
Settings load_settings(const std::filesystem::path& path);

std::string to_yaml(const Settings& settings);
void save_settings(const std::filesystem::path& path, const Settings& settings);

}  // namespace speed
