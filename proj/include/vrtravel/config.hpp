#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>

#include <json.hpp>

#include "vrtravel/harness.hpp"

namespace vrtravel {

/// Where a session's world comes from: a world file, or a generator seed.
struct WorldRef {
    std::optional<std::filesystem::path> file;
    std::uint64_t seed = 1;
    WorldSpec spec;
};

/// Everything a config file can set. Missing keys keep their defaults.
struct RunConfig {
    EngineConfig engine;
    WorldRef world;
    PolicyParams policy;
    ExperimentConfig experiment;
};

/// Overlays the keys present in `doc` onto `base`. Throws ConfigError on bad values.
EngineConfig engine_config_from_json(const nlohmann::json& doc, EngineConfig base = {});
nlohmann::json engine_config_to_json(const EngineConfig& cfg);
PolicyParams policy_from_json(const nlohmann::json& doc, PolicyParams base = {});

/// Relative world file paths resolve against `base_dir`.
RunConfig run_config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

std::shared_ptr<const WorldModel> resolve_world(const WorldRef& ref);

}  // namespace vrtravel
