#include "speed/settings.hpp"

#include <yaml-cpp/yaml.h>

#include <charconv>
#include <fstream>
#include <initializer_list>
#include <sstream>

namespace speed {
namespace {

// Shortest text that parses back to the same double.
std::string number(double v) {
    char buf[32];
    const auto end = std::to_chars(buf, buf + sizeof buf, v).ptr;
    return std::string(buf, end);
}

void reject_unknown(const YAML::Node& node, const std::string& section, std::initializer_list<const char*> known) {
    if (!node.IsMap()) {
        throw ConfigError("section '" + section + "' must be a mapping");
    }
    for (const auto& kv : node) {
        const auto key = kv.first.as<std::string>();
        bool found = false;
        for (const char* k : known) {
            found = found || key == k;
        }
        if (!found) {
            throw ConfigError("unknown key '" + section + "." + key + "'");
        }
    }
}

template <typename T>
void read(const YAML::Node& node, const char* key, T& out, const std::string& section) {
    if (const YAML::Node v = node[key]) {
        try {
            out = v.as<T>();
        } catch (const YAML::Exception& e) {
            throw ConfigError("bad value for '" + section + "." + key + "': " + e.what());
        }
    }
}

std::vector<Stage> read_stages(const YAML::Node& v, const std::string& where) {
    if (v.IsScalar()) {
        return parse_stage_list(v.as<std::string>());
    }
    if (!v.IsSequence()) {
        throw ConfigError("'" + where + "' must be a list of stage identifiers");
    }
    std::vector<Stage> out;
    for (const auto& item : v) {
        out.push_back(parse_stage(item.as<std::string>()));
    }
    return out;
}

void read_threshold(const YAML::Node& node, const char* key, std::optional<double>& out) {
    if (const YAML::Node v = node[key]) {
        const auto text = v.as<std::string>();
        if (text == "auto") {
            out.reset();
            return;
        }
        try {
            out = v.as<double>();
        } catch (const YAML::Exception&) {
            throw ConfigError(std::string("canny.") + key + " must be a number or 'auto'");
        }
    }
}

}  // namespace

Settings parse_settings(const std::string& yaml) {
    YAML::Node root;
    try {
        root = YAML::Load(yaml);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("cannot parse config: ") + e.what());
    }
    Settings s;
    if (!root || root.IsNull()) {
        return s;
    }
    reject_unknown(root, "<root>", {"pipeline", "diffusion", "triggers", "gaussian", "canny", "evaluation"});
    PipelineConfig& p = s.pipeline;

    if (const auto n = root["pipeline"]) {
        reject_unknown(n, "pipeline", {"stage_order", "disabled", "force_conditionals", "forced", "fhh_levels"});
        if (n["stage_order"]) {
            p.stage_order = read_stages(n["stage_order"], "pipeline.stage_order");
        }
        if (n["disabled"]) {
            const auto disabled = read_stages(n["disabled"], "pipeline.disabled");
            p.disabled_stages = std::set<Stage>(disabled.begin(), disabled.end());
        }
        if (n["forced"]) {
            const auto forced = read_stages(n["forced"], "pipeline.forced");
            p.forced_stages = std::set<Stage>(forced.begin(), forced.end());
        }
        read(n, "force_conditionals", p.force_conditionals, "pipeline");
        read(n, "fhh_levels", p.fhh_levels, "pipeline");
    }
    if (const auto n = root["diffusion"]) {
        reject_unknown(n, "diffusion", {"iterations", "time_step", "k", "k_mode"});
        read(n, "iterations", p.diffusion.iterations, "diffusion");
        read(n, "time_step", p.diffusion.time_step, "diffusion");
        read(n, "k", p.diffusion.k, "diffusion");
        if (const auto m = n["k_mode"]) {
            const auto mode = m.as<std::string>();
            if (mode == "fixed") {
                p.diffusion.k_mode = KMode::fixed;
            } else if (mode == "noise_estimate") {
                p.diffusion.k_mode = KMode::noise_estimate;
            } else {
                throw ConfigError("diffusion.k_mode must be 'fixed' or 'noise_estimate'");
            }
        }
    }
    if (const auto n = root["triggers"]) {
        reject_unknown(n, "triggers",
                       {"skew_tail_fraction", "skew_ratio_threshold", "shift_factor", "shift_mode",
                        "sparse_bin_fraction", "sparse_bin_trigger", "sparse_denominator"});
        auto& t = p.triggers;
        read(n, "skew_tail_fraction", t.skew_tail_fraction, "triggers");
        read(n, "skew_ratio_threshold", t.skew_ratio_threshold, "triggers");
        read(n, "shift_factor", t.shift_factor, "triggers");
        read(n, "sparse_bin_fraction", t.sparse_bin_fraction, "triggers");
        read(n, "sparse_bin_trigger", t.sparse_bin_trigger, "triggers");
        if (const auto m = n["shift_mode"]) {
            const auto mode = m.as<std::string>();
            if (mode == "additive") {
                t.shift_mode = ShiftMode::additive;
            } else if (mode == "multiplicative") {
                t.shift_mode = ShiftMode::multiplicative;
            } else {
                throw ConfigError("triggers.shift_mode must be 'additive' or 'multiplicative'");
            }
        }
        if (const auto m = n["sparse_denominator"]) {
            const auto mode = m.as<std::string>();
            if (mode == "non_empty_bins") {
                t.sparse_denominator = SparseDenominator::non_empty_bins;
            } else if (mode == "all_bins") {
                t.sparse_denominator = SparseDenominator::all_bins;
            } else {
                throw ConfigError("triggers.sparse_denominator must be 'non_empty_bins' or 'all_bins'");
            }
        }
    }
    if (const auto n = root["gaussian"]) {
        reject_unknown(n, "gaussian", {"sigma"});
        read(n, "sigma", p.gaussian.sigma, "gaussian");
    }
    if (const auto n = root["canny"]) {
        reject_unknown(n, "canny", {"low_threshold", "high_threshold", "auto_mode", "low_ratio", "noise_multiplier"});
        read_threshold(n, "low_threshold", p.canny.low_threshold);
        read_threshold(n, "high_threshold", p.canny.high_threshold);
        read(n, "low_ratio", p.canny.low_ratio, "canny");
        read(n, "noise_multiplier", p.canny.noise_multiplier, "canny");
        if (const auto m = n["auto_mode"]) {
            const auto mode = m.as<std::string>();
            if (mode == "otsu") {
                p.canny.auto_mode = AutoThresholdMode::otsu;
            } else if (mode == "noise") {
                p.canny.auto_mode = AutoThresholdMode::noise;
            } else {
                throw ConfigError("canny.auto_mode must be 'otsu' or 'noise'");
            }
        }
    }
    if (const auto n = root["evaluation"]) {
        reject_unknown(n, "evaluation", {"ssim_sigma", "ssim_window", "ssim_k1", "ssim_k2", "dynamic_range",
                                         "include_difficult"});
        auto& e = s.evaluation;
        read(n, "ssim_sigma", e.ssim.sigma, "evaluation");
        read(n, "ssim_window", e.ssim.window, "evaluation");
        read(n, "ssim_k1", e.ssim.k1, "evaluation");
        read(n, "ssim_k2", e.ssim.k2, "evaluation");
        read(n, "dynamic_range", e.ssim.dynamic_range, "evaluation");
        read(n, "include_difficult", e.ground_truth.include_difficult, "evaluation");
    }
    validate(s.pipeline);
    validate(s.evaluation.ssim);
    return s;
}

Settings load_settings(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file " + path.string());
    }
    std::stringstream buffer;
    buffer << in.rdbuf();
    return parse_settings(buffer.str());
}

std::string to_yaml(const Settings& settings) {
    const PipelineConfig& p = settings.pipeline;
    YAML::Emitter out;
    out << YAML::BeginMap;

    out << YAML::Key << "pipeline" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "stage_order" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (Stage s : p.stage_order) {
        out << std::string(to_string(s));
    }
    out << YAML::EndSeq;
    out << YAML::Key << "disabled" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (Stage s : p.disabled_stages) {
        out << std::string(to_string(s));
    }
    out << YAML::EndSeq;
    out << YAML::Key << "force_conditionals" << YAML::Value << p.force_conditionals;
    out << YAML::Key << "forced" << YAML::Value << YAML::Flow << YAML::BeginSeq;
    for (Stage s : p.forced_stages) {
        out << std::string(to_string(s));
    }
    out << YAML::EndSeq;
    out << YAML::Key << "fhh_levels" << YAML::Value << p.fhh_levels;
    out << YAML::EndMap;

    out << YAML::Key << "diffusion" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "iterations" << YAML::Value << p.diffusion.iterations;
    out << YAML::Key << "time_step" << YAML::Value << number(p.diffusion.time_step);
    out << YAML::Key << "k_mode" << YAML::Value
        << (p.diffusion.k_mode == KMode::fixed ? "fixed" : "noise_estimate");
    out << YAML::Key << "k" << YAML::Value << number(p.diffusion.k);
    out << YAML::EndMap;

    const auto& t = p.triggers;
    out << YAML::Key << "triggers" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "skew_tail_fraction" << YAML::Value << number(t.skew_tail_fraction);
    out << YAML::Key << "skew_ratio_threshold" << YAML::Value << number(t.skew_ratio_threshold);
    out << YAML::Key << "shift_factor" << YAML::Value << number(t.shift_factor);
    out << YAML::Key << "shift_mode" << YAML::Value
        << (t.shift_mode == ShiftMode::additive ? "additive" : "multiplicative");
    out << YAML::Key << "sparse_bin_fraction" << YAML::Value << number(t.sparse_bin_fraction);
    out << YAML::Key << "sparse_bin_trigger" << YAML::Value << number(t.sparse_bin_trigger);
    out << YAML::Key << "sparse_denominator" << YAML::Value
        << (t.sparse_denominator == SparseDenominator::non_empty_bins ? "non_empty_bins" : "all_bins");
    out << YAML::EndMap;

    out << YAML::Key << "gaussian" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "sigma" << YAML::Value << number(p.gaussian.sigma);
    out << YAML::EndMap;

    out << YAML::Key << "canny" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "auto_mode" << YAML::Value
        << (p.canny.auto_mode == AutoThresholdMode::otsu ? "otsu" : "noise");
    if (p.canny.low_threshold) {
        out << YAML::Key << "low_threshold" << YAML::Value << number(*p.canny.low_threshold);
        out << YAML::Key << "high_threshold" << YAML::Value << number(*p.canny.high_threshold);
    } else {
        out << YAML::Key << "low_threshold" << YAML::Value << "auto";
        out << YAML::Key << "high_threshold" << YAML::Value << "auto";
    }
    out << YAML::Key << "low_ratio" << YAML::Value << number(p.canny.low_ratio);
    out << YAML::Key << "noise_multiplier" << YAML::Value << number(p.canny.noise_multiplier);
    out << YAML::EndMap;

    const auto& e = settings.evaluation;
    out << YAML::Key << "evaluation" << YAML::Value << YAML::BeginMap;
    out << YAML::Key << "ssim_sigma" << YAML::Value << number(e.ssim.sigma);
    out << YAML::Key << "ssim_window" << YAML::Value << e.ssim.window;
    out << YAML::Key << "ssim_k1" << YAML::Value << number(e.ssim.k1);
    out << YAML::Key << "ssim_k2" << YAML::Value << number(e.ssim.k2);
    out << YAML::Key << "dynamic_range" << YAML::Value << number(e.ssim.dynamic_range);
    out << YAML::Key << "include_difficult" << YAML::Value << e.ground_truth.include_difficult;
    out << YAML::EndMap;

    out << YAML::EndMap;
    return std::string(out.c_str()) + "\n";
}

void save_settings(const std::filesystem::path& path, const Settings& settings) {
    std::ofstream out(path);
    if (!out) {
        throw ConfigError("cannot write config file " + path.string());
    }
    out << to_yaml(settings);
}

}  // namespace speed
