#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "vrtravel/world.hpp"

namespace vrtravel {

/// World file schema version written into the "v" field.
inline constexpr int kWorldSchemaVersion = 1;

/// Full world document with explicit heights.
nlohmann::json world_to_json(const WorldModel& world);

/// Compact document holding only seed + spec; loading regenerates the world.
nlohmann::json world_recipe_json(std::uint64_t seed, const WorldSpec& spec);

/// Accepts explicit heights, or seed + spec. Throws ConfigError on malformed input.
WorldModel world_from_json(const nlohmann::json& doc);

nlohmann::json spec_to_json(const WorldSpec& spec);
WorldSpec spec_from_json(const nlohmann::json& doc);

WorldModel load_world(const std::filesystem::path& path);
void save_world(const WorldModel& world, const std::filesystem::path& path);

nlohmann::json vec_to_json(const Vec3& v);
Vec3 vec_from_json(const nlohmann::json& j);

}  // namespace vrtravel
