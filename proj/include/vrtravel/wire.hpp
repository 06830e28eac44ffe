#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "vrtravel/engine.hpp"

namespace vrtravel::wire {

/// Value of the "v" field on every message.
inline constexpr int kWireVersion = 1;

enum class ClientType { start, input, ping, finish };

struct ClientMessage {
    ClientType type = ClientType::ping;
    /// start: session config overlay.
    nlohmann::json config = nlohmann::json::object();
    /// input: the event; its tick is assigned by the server.
    InputEvent event;
};

/// Throws ParseError on malformed JSON, wrong version or unknown type.
ClientMessage parse_client_message(std::string_view text);

/// Running counters over a growing event log, cheap to refresh every tick.
class LiveReport {
public:
    void update(const EventLog& log);
    nlohmann::json to_json(const Session& s) const;

private:
    std::size_t seen_ = 0;
    std::uint64_t aims_ = 0;
    std::uint64_t near_ = 0;
    std::uint64_t medium_ = 0;
    std::uint64_t far_ = 0;
    std::uint64_t switches_ = 0;
    std::uint64_t relocations_ = 0;
    std::uint64_t arrivals_ = 0;
    double real_walk_ = 0.0;
};

nlohmann::json pose_to_json(const Pose& p);
nlohmann::json state_message(const Session& s, const LiveReport& report);
nlohmann::json world_message(const WorldModel& world);
nlohmann::json error_message(std::string_view msg);
nlohmann::json pong_message(std::uint64_t tick);
nlohmann::json finished_message(const Session& s, const std::string& script_jsonl);

}  // namespace vrtravel::wire
