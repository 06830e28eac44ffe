#include "vrtravel/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include <json.hpp>

#include "vrtravel/errors.hpp"

namespace vrtravel {

using nlohmann::json;

std::string_view to_string(EventKind k) {
    switch (k) {
        case EventKind::aim: return "aim";
        case EventKind::mode_switch: return "mode_switch";
        case EventKind::relocation: return "relocation";
        case EventKind::arrival: return "arrival";
        case EventKind::move: return "move";
        case EventKind::session_end: return "session_end";
    }
    return "?";
}

std::string_view to_string(LoggedMode m) { return m == LoggedMode::tm ? "TM" : "NM"; }

std::string_view to_string(TechniqueId t) { return t == TechniqueId::teleport ? "teleport" : "outstanding"; }

TechniqueId technique_from_string(std::string_view s) {
    if (s == "outstanding") return TechniqueId::outstanding;
    if (s == "teleport") return TechniqueId::teleport;
    throw ConfigError("unknown technique '" + std::string(s) + "'");
}

std::string_view to_string(DistanceBucket b) {
    switch (b) {
        case DistanceBucket::near: return "near";
        case DistanceBucket::medium: return "medium";
        case DistanceBucket::far: return "long";
    }
    return "?";
}

namespace {

EventKind kind_from_string(std::string_view s) {
    for (auto k : {EventKind::aim, EventKind::mode_switch, EventKind::relocation, EventKind::arrival, EventKind::move,
                   EventKind::session_end})
        if (to_string(k) == s) return k;
    throw std::invalid_argument("unknown event kind '" + std::string(s) + "'");
}

LoggedMode mode_from_string(std::string_view s) {
    if (s == "NM") return LoggedMode::nm;
    if (s == "TM") return LoggedMode::tm;
    throw std::invalid_argument("unknown mode '" + std::string(s) + "'");
}

void check_record(const EventRecord& r, const EventRecord* prev, std::size_t index) {
    if (prev && r.tick < prev->tick) throw ParseError(index, "tick decreases");
    if (!std::isfinite(r.sim_time) || r.sim_time < 0.0) throw ParseError(index, "invalid sim time");
    if (r.distance && (!std::isfinite(*r.distance) || *r.distance < 0.0))
        throw ParseError(index, "distance must be finite and >= 0");
    if (r.kind == EventKind::aim && !r.distance) throw ParseError(index, "aim record without distance");
}

}  // namespace

void EventLog::append(EventRecord r) {
    try {
        check_record(r, records_.empty() ? nullptr : &records_.back(), records_.size());
    } catch (const ParseError& e) {
        throw DomainError(e.what());
    }
    records_.push_back(std::move(r));
}

std::string record_to_json_line(const EventRecord& r) {
    json j = {{"v", kEventSchemaVersion},
              {"tick", r.tick},
              {"time", r.sim_time},
              {"kind", to_string(r.kind)},
              {"mode", to_string(r.mode)},
              {"technique", to_string(r.technique)}};
    if (r.distance) j["distance"] = *r.distance;
    if (r.peak_flow) j["peak_flow"] = *r.peak_flow;
    return j.dump();
}

std::string EventLog::to_jsonl() const {
    std::string out;
    for (const auto& r : records_) {
        out += record_to_json_line(r);
        out += '\n';
    }
    return out;
}

EventLog EventLog::from_jsonl(std::string_view text) {
    EventLog log;
    std::size_t index = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) end = text.size();
        const std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) continue;
        EventRecord r;
        try {
            const json j = json::parse(line);
            if (j.at("v").get<int>() != kEventSchemaVersion) throw std::invalid_argument("unsupported schema version");
            r.tick = j.at("tick").get<std::uint64_t>();
            r.sim_time = j.at("time").get<double>();
            r.kind = kind_from_string(j.at("kind").get<std::string>());
            r.mode = mode_from_string(j.at("mode").get<std::string>());
            r.technique = technique_from_string(j.at("technique").get<std::string>());
            if (j.contains("distance")) r.distance = j.at("distance").get<double>();
            if (j.contains("peak_flow")) r.peak_flow = j.at("peak_flow").get<double>();
        } catch (const ParseError&) {
            throw;
        } catch (const std::exception& e) {
            throw ParseError(index, e.what());
        }
        check_record(r, log.records_.empty() ? nullptr : &log.records_.back(), index);
        log.records_.push_back(r);
        ++index;
    }
    return log;
}

DistanceBucket distance_bucket(double meters) {
    if (!(meters >= 0.0)) throw DomainError("distance_bucket: distance must be >= 0");
    if (meters <= 2.0) return DistanceBucket::near;
    if (meters <= 40.0) return DistanceBucket::medium;
    return DistanceBucket::far;
}

double normalized_flow(double linear_speed, double scale, double eye_height_base) {
    if (!(scale >= 1.0)) throw DomainError("normalized_flow: scale must be >= 1");
    return linear_speed / (scale * eye_height_base);
}

SessionReport summarize(const EventLog& log, double tick_rate) {
    if (!(tick_rate > 0.0)) throw DomainError("summarize: tick_rate must be > 0");
    SessionReport rep;
    const auto& recs = log.records();
    if (recs.empty()) return rep;

    std::uint64_t end_tick = recs.back().tick + 1;
    std::uint64_t tm_ticks = 0;
    std::optional<std::uint64_t> tm_since;
    bool ended = false;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const EventRecord& r = recs[i];
        check_record(r, i ? &recs[i - 1] : nullptr, i);
        switch (r.kind) {
            case EventKind::aim:
                ++rep.aims;
                switch (distance_bucket(*r.distance)) {
                    case DistanceBucket::near: ++rep.aims_near; break;
                    case DistanceBucket::medium: ++rep.aims_medium; break;
                    case DistanceBucket::far: ++rep.aims_far; break;
                }
                break;
            case EventKind::mode_switch:
                ++rep.mode_switches;
                if (r.mode == LoggedMode::tm) {
                    if (!tm_since) tm_since = r.tick;
                } else if (tm_since) {
                    tm_ticks += r.tick - *tm_since;
                    tm_since.reset();
                }
                break;
            case EventKind::relocation: ++rep.relocations; break;
            case EventKind::arrival: ++rep.arrivals; break;
            case EventKind::move: {
                const double d = r.distance.value_or(0.0);
                rep.real_walk += d;
                (r.mode == LoggedMode::tm ? rep.real_walk_tm : rep.real_walk_nm) += d;
                break;
            }
            case EventKind::session_end:
                if (ended) throw ParseError(i, "duplicate session_end");
                ended = true;
                end_tick = r.tick;
                rep.avatar_virtual = r.distance.value_or(0.0);
                rep.peak_flow = r.peak_flow.value_or(0.0);
                break;
        }
    }
    if (tm_since) tm_ticks += end_tick - std::min(end_tick, *tm_since);

    rep.playtime = static_cast<double>(end_tick) / tick_rate;
    rep.tm_time = static_cast<double>(tm_ticks) / tick_rate;
    rep.nm_time = static_cast<double>(end_tick - tm_ticks) / tick_rate;
    return rep;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

std::string report_csv_header() {
    return "playtime_s,nm_time_s,tm_time_s,aims,aims_near,aims_medium,aims_long,mode_switches,relocations,"
           "arrivals,real_walk_m,real_walk_nm_m,real_walk_tm_m,avatar_virtual_m,peak_flow";
}

std::string report_csv_fields(const SessionReport& r) {
    std::ostringstream o;
    o << format_number(r.playtime) << ',' << format_number(r.nm_time) << ',' << format_number(r.tm_time) << ','
      << r.aims << ',' << r.aims_near << ',' << r.aims_medium << ',' << r.aims_far << ',' << r.mode_switches << ','
      << r.relocations << ',' << r.arrivals << ',' << format_number(r.real_walk) << ','
      << format_number(r.real_walk_nm) << ',' << format_number(r.real_walk_tm) << ','
      << format_number(r.avatar_virtual) << ',' << format_number(r.peak_flow);
    return o.str();
}

}  // namespace vrtravel
