#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace vrtravel {

inline constexpr int kEventSchemaVersion = 1;
inline constexpr int kReportSchemaVersion = 1;

enum class EventKind { aim, mode_switch, relocation, arrival, move, session_end };
enum class LoggedMode { nm, tm };
enum class TechniqueId { outstanding, teleport };

std::string_view to_string(EventKind k);
std::string_view to_string(LoggedMode m);
std::string_view to_string(TechniqueId t);
TechniqueId technique_from_string(std::string_view s);

/// One interaction record.
///   aim          distance = straight line from the body to the committed target
///   mode_switch  mode = the mode being entered
///   relocation   distance = instantaneous viewpoint jump
///   arrival      distance = path length walked for the finished command
///   move         distance = physical (room) displacement this tick
///   session_end  tick = ticks elapsed; distance = avatar virtual distance; peak_flow
struct EventRecord {
    std::uint64_t tick = 0;
    double sim_time = 0.0;
    EventKind kind = EventKind::aim;
    std::optional<double> distance;
    LoggedMode mode = LoggedMode::nm;
    TechniqueId technique = TechniqueId::outstanding;
    std::optional<double> peak_flow;

    bool operator==(const EventRecord&) const = default;
};

/// Append-only, tick-ordered record list.
class EventLog {
public:
    /// Throws DomainError if the tick decreases or an aim lacks a non-negative distance.
    void append(EventRecord r);
    const std::vector<EventRecord>& records() const { return records_; }
    std::size_t size() const { return records_.size(); }
    bool empty() const { return records_.empty(); }

    /// Line-delimited JSON, one record per line.
    std::string to_jsonl() const;
    /// Throws ParseError with the offending record index.
    static EventLog from_jsonl(std::string_view text);

    bool operator==(const EventLog&) const = default;

private:
    std::vector<EventRecord> records_;
};

std::string record_to_json_line(const EventRecord& r);

enum class DistanceBucket { near, medium, far };

/// near <= 2 m < medium <= 40 m < far. Throws DomainError for negative input.
DistanceBucket distance_bucket(double meters);
std::string_view to_string(DistanceBucket b);

/// Ground flow in body heights per second: speed / (scale * eye_height_base).
double normalized_flow(double linear_speed, double scale, double eye_height_base = 1.70);

struct SessionReport {
    double playtime = 0.0;
    double nm_time = 0.0;
    double tm_time = 0.0;
    std::uint64_t aims = 0;
    std::uint64_t aims_near = 0;
    std::uint64_t aims_medium = 0;
    std::uint64_t aims_far = 0;
    std::uint64_t mode_switches = 0;
    std::uint64_t relocations = 0;
    std::uint64_t arrivals = 0;
    double real_walk = 0.0;
    double real_walk_nm = 0.0;
    double real_walk_tm = 0.0;
    double avatar_virtual = 0.0;
    double peak_flow = 0.0;

    bool operator==(const SessionReport&) const = default;
};

/// Pure fold over the log. Throws ParseError on malformed records.
SessionReport summarize(const EventLog& log, double tick_rate);

/// Shared number formatting for CSV output (%.10g).
std::string format_number(double v);

std::string report_csv_header();
std::string report_csv_fields(const SessionReport& r);

}  // namespace vrtravel
