#include "vrtravel/wire.hpp"

#include "vrtravel/errors.hpp"
#include "vrtravel/world_io.hpp"

namespace vrtravel::wire {

using nlohmann::json;

ClientMessage parse_client_message(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(0, std::string("malformed JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError(0, "message must be a JSON object");
    if (!j.contains("v") || !j["v"].is_number_integer() || j["v"].get<int>() != kWireVersion)
        throw ParseError(0, "missing or unsupported \"v\"");
    if (!j.contains("type") || !j["type"].is_string()) throw ParseError(0, "missing \"type\"");

    ClientMessage m;
    const std::string type = j["type"].get<std::string>();
    if (type == "ping") {
        m.type = ClientType::ping;
    } else if (type == "finish") {
        m.type = ClientType::finish;
    } else if (type == "start") {
        m.type = ClientType::start;
        if (j.contains("config")) {
            if (!j["config"].is_object()) throw ParseError(0, "\"config\" must be an object");
            m.config = j["config"];
        }
    } else if (type == "input") {
        m.type = ClientType::input;
        if (!j.contains("event") || !j["event"].is_object()) throw ParseError(0, "input needs an \"event\" object");
        json ev = j["event"];
        ev["tick"] = 0;
        ev.erase("v");
        m.event = input_from_json(ev.dump(), 0);
    } else {
        throw ParseError(0, "unknown message type '" + type + "'");
    }
    return m;
}

void LiveReport::update(const EventLog& log) {
    const auto& recs = log.records();
    for (; seen_ < recs.size(); ++seen_) {
        const EventRecord& r = recs[seen_];
        switch (r.kind) {
            case EventKind::aim:
                ++aims_;
                switch (distance_bucket(r.distance.value_or(0.0))) {
                    case DistanceBucket::near: ++near_; break;
                    case DistanceBucket::medium: ++medium_; break;
                    case DistanceBucket::far: ++far_; break;
                }
                break;
            case EventKind::mode_switch: ++switches_; break;
            case EventKind::relocation: ++relocations_; break;
            case EventKind::arrival: ++arrivals_; break;
            case EventKind::move: real_walk_ += r.distance.value_or(0.0); break;
            case EventKind::session_end: break;
        }
    }
}

json LiveReport::to_json(const Session& s) const {
    return {{"playtime", s.sim_time()},
            {"aims", aims_},
            {"aims_near", near_},
            {"aims_medium", medium_},
            {"aims_long", far_},
            {"mode_switches", switches_},
            {"relocations", relocations_},
            {"arrivals", arrivals_},
            {"real_walk", real_walk_},
            {"avatar_virtual", s.avatar().distance_walked_virtual},
            {"peak_flow", s.peak_flow()}};
}

json pose_to_json(const Pose& p) {
    return {{"position", vec_to_json(p.position)}, {"yaw", p.yaw}, {"pitch", p.pitch}};
}

json state_message(const Session& s, const LiveReport& report) {
    const RigState& rig = s.rig();
    json rig_j = pose_to_json(rig.eye);
    rig_j["scale"] = rig.scale;
    rig_j["eye_separation"] = rig.eye_separation;

    const AvatarState& av = s.avatar();
    json avatar_j = pose_to_json(av.pose);
    avatar_j["speed_mode"] = av.speed_mode == SpeedMode::run ? "run" : "walk";

    json path = json::array();
    if (av.has_path()) {
        path.push_back(vec_to_json(av.pose.position));
        for (std::size_t i = av.next_waypoint; i < av.path.size(); ++i) path.push_back(vec_to_json(av.path[i]));
    }

    json preview = nullptr;
    if (const auto hit = s.preview_hit()) {
        preview = {{"hit", vec_to_json(hit->point)}, {"valid", s.preview_valid()}};
        if (const auto& tp = s.teleport().preview; s.config().technique == TechniqueId::teleport && tp) {
            json arc = json::array();
            for (const Vec3& p : tp->arc.samples) arc.push_back(vec_to_json(p));
            preview["arc"] = std::move(arc);
        }
    }

    return {{"v", kWireVersion},
            {"type", "state"},
            {"tick", s.tick()},
            {"time", s.sim_time()},
            {"technique", to_string(s.config().technique)},
            {"mode", to_string(s.logged_mode())},
            {"phase", to_string(s.phase())},
            {"rig", std::move(rig_j)},
            {"avatar", std::move(avatar_j)},
            {"path", std::move(path)},
            {"preview", std::move(preview)},
            {"occluded", s.avatar_occluded()},
            {"flow", s.last_flow()},
            {"report", report.to_json(s)}};
}

json world_message(const WorldModel& world) {
    return {{"v", kWireVersion}, {"type", "world"}, {"world", world_to_json(world)}};
}

json error_message(std::string_view msg) { return {{"v", kWireVersion}, {"type", "error"}, {"msg", msg}}; }

json pong_message(std::uint64_t tick) { return {{"v", kWireVersion}, {"type", "pong"}, {"tick", tick}}; }

json finished_message(const Session& s, const std::string& script_jsonl) {
    return {{"v", kWireVersion},
            {"type", "finished"},
            {"tick", s.tick()},
            {"script", script_jsonl},
            {"events", s.log().to_jsonl()}};
}

}  // namespace vrtravel::wire
