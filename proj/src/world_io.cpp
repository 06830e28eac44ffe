#include "vrtravel/world_io.hpp"

#include <fstream>

#include "vrtravel/errors.hpp"
#include "vrtravel/geometry.hpp"

namespace vrtravel {

using nlohmann::json;

json vec_to_json(const Vec3& v) { return json::array({v.x, v.y, v.z}); }

Vec3 vec_from_json(const json& j) {
    if (!j.is_array() || j.size() != 3) throw ConfigError("expected a 3-vector [x, y, z]");
    return {j.at(0).get<double>(), j.at(1).get<double>(), j.at(2).get<double>()};
}

namespace {

json obstacle_to_json(const Obstacle& o) {
    if (const auto* b = std::get_if<Box>(&o)) return {{"type", "box"}, {"min", vec_to_json(b->min)}, {"max", vec_to_json(b->max)}};
    const auto& c = std::get<Cylinder>(o);
    return {{"type", "cylinder"}, {"x", c.x}, {"z", c.z}, {"base", c.base}, {"radius", c.radius}, {"height", c.height}};
}

Obstacle obstacle_from_json(const json& j) {
    const std::string type = j.at("type").get<std::string>();
    if (type == "box") return Box{vec_from_json(j.at("min")), vec_from_json(j.at("max"))};
    if (type == "cylinder")
        return Cylinder{j.at("x").get<double>(), j.at("z").get<double>(), j.at("base").get<double>(),
                        j.at("radius").get<double>(), j.at("height").get<double>()};
    throw ConfigError("unknown obstacle type '" + type + "'");
}

json points_to_json(const std::vector<Vec3>& pts) {
    json arr = json::array();
    for (const auto& p : pts) arr.push_back(vec_to_json(p));
    return arr;
}

std::vector<Vec3> points_from_json(const json& j) {
    std::vector<Vec3> pts;
    for (const auto& p : j) pts.push_back(vec_from_json(p));
    return pts;
}

}  // namespace

json spec_to_json(const WorldSpec& s) {
    return {{"extent_x", s.extent_x},   {"extent_z", s.extent_z},     {"cell_size", s.cell_size},
            {"path_length", s.path_length}, {"targets", s.targets},   {"obstacles", s.obstacles},
            {"winding_cap", s.winding_cap}, {"min_target_spacing", s.min_target_spacing}};
}

WorldSpec spec_from_json(const json& j) {
    WorldSpec s;
    s.extent_x = j.value("extent_x", s.extent_x);
    s.extent_z = j.value("extent_z", s.extent_z);
    s.cell_size = j.value("cell_size", s.cell_size);
    s.path_length = j.value("path_length", s.path_length);
    s.targets = j.value("targets", s.targets);
    s.obstacles = j.value("obstacles", s.obstacles);
    s.winding_cap = j.value("winding_cap", s.winding_cap);
    s.min_target_spacing = j.value("min_target_spacing", s.min_target_spacing);
    return s;
}

json world_to_json(const WorldModel& world) {
    const Heightmap& t = world.terrain();
    json heights = json::array();
    for (std::size_t r = 0; r < t.rows(); ++r) {
        json row = json::array();
        for (std::size_t c = 0; c < t.cols(); ++c) row.push_back(t.sample(c, r));
        heights.push_back(std::move(row));
    }
    json obstacles = json::array();
    for (const auto& o : world.obstacles()) obstacles.push_back(obstacle_to_json(o));

    json doc = {{"v", kWorldSchemaVersion},
                {"cell_size", t.cell_size()},
                {"max_slope_deg", rad_to_deg(world.max_slope())},
                {"heights", std::move(heights)},
                {"obstacles", std::move(obstacles)},
                {"targets", points_to_json(world.targets())},
                {"start", vec_to_json(world.start())},
                {"course", points_to_json(world.course())}};
    // radians are stored too so the round trip is exact
    doc["max_slope"] = world.max_slope();
    if (world.seed()) doc["seed"] = *world.seed();
    if (world.spec()) doc["spec"] = spec_to_json(*world.spec());
    return doc;
}

json world_recipe_json(std::uint64_t seed, const WorldSpec& spec) {
    return {{"v", kWorldSchemaVersion}, {"seed", seed}, {"spec", spec_to_json(spec)}};
}

WorldModel world_from_json(const json& doc) {
    try {
        if (!doc.is_object()) throw ConfigError("world document must be a JSON object");
        if (doc.contains("v") && doc.at("v").get<int>() != kWorldSchemaVersion)
            throw ConfigError("unsupported world schema version");
        if (!doc.contains("heights")) {
            if (!doc.contains("seed")) throw ConfigError("world needs either heights or seed + spec");
            const WorldSpec spec = doc.contains("spec") ? spec_from_json(doc.at("spec")) : WorldSpec{};
            return generate_world(doc.at("seed").get<std::uint64_t>(), spec);
        }

        const double cell = doc.at("cell_size").get<double>();
        const json& rows = doc.at("heights");
        if (!rows.is_array() || rows.empty()) throw ConfigError("heights must be a non-empty 2-D array");
        const std::size_t ncols = rows.at(0).size();
        std::vector<double> samples;
        samples.reserve(rows.size() * ncols);
        for (const auto& row : rows) {
            if (row.size() != ncols) throw ConfigError("heights rows differ in length");
            for (const auto& h : row) samples.push_back(h.get<double>());
        }

        WorldModel::Layout layout;
        if (doc.contains("obstacles"))
            for (const auto& o : doc.at("obstacles")) layout.obstacles.push_back(obstacle_from_json(o));
        if (doc.contains("targets")) layout.targets = points_from_json(doc.at("targets"));
        if (doc.contains("course")) layout.course = points_from_json(doc.at("course"));
        if (doc.contains("max_slope"))
            layout.max_slope = doc.at("max_slope").get<double>();
        else if (doc.contains("max_slope_deg"))
            layout.max_slope = deg_to_rad(doc.at("max_slope_deg").get<double>());
        if (doc.contains("seed")) layout.seed = doc.at("seed").get<std::uint64_t>();
        if (doc.contains("spec")) layout.spec = spec_from_json(doc.at("spec"));

        Heightmap terrain(ncols, rows.size(), cell, std::move(samples));
        if (doc.contains("start"))
            layout.start = vec_from_json(doc.at("start"));
        else
            layout.start = {0.0, terrain.height_at(0.0, 0.0), 0.0};
        return WorldModel(std::move(terrain), std::move(layout));
    } catch (const json::exception& e) {
        throw ConfigError(std::string("malformed world document: ") + e.what());
    }
}

WorldModel load_world(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open world file " + path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw ConfigError("world file " + path.string() + " is not valid JSON: " + e.what());
    }
    return world_from_json(doc);
}

void save_world(const WorldModel& world, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write world file " + path.string());
    out << world_to_json(world).dump() << '\n';
}

}  // namespace vrtravel
