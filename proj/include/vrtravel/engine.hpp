#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "vrtravel/avatar.hpp"
#include "vrtravel/metrics.hpp"
#include "vrtravel/technique_outstanding.hpp"
#include "vrtravel/technique_teleport.hpp"
#include "vrtravel/world.hpp"

namespace vrtravel {

inline constexpr int kScriptSchemaVersion = 1;

enum class InputKind { move, look, trigger_press, trigger_release, switch_button, run_toggle, catch_up };

std::string_view to_string(InputKind k);

/// One player input. move carries physical room meters (a = dx east, b = dz north);
/// look carries radians (a = dyaw, b = dpitch).
struct InputEvent {
    std::uint64_t tick = 0;
    InputKind kind = InputKind::move;
    double a = 0.0;
    double b = 0.0;

    static InputEvent move(std::uint64_t tick, double dx, double dz) { return {tick, InputKind::move, dx, dz}; }
    static InputEvent look(std::uint64_t tick, double dyaw, double dpitch) {
        return {tick, InputKind::look, dyaw, dpitch};
    }
    static InputEvent of(std::uint64_t tick, InputKind k) { return {tick, k, 0.0, 0.0}; }

    bool operator==(const InputEvent&) const = default;
};

/// Input stream plus the tick count the session ran for.
struct InputScript {
    std::vector<InputEvent> events;
    /// Ticks to run; 0 means "until the last event's tick".
    std::uint64_t end_tick = 0;

    /// Line-delimited JSON; the last line is an {"kind":"end"} marker when end_tick > 0.
    std::string to_jsonl() const;
    /// Throws ParseError with the line's record index.
    static InputScript from_jsonl(std::string_view text);
    bool operator==(const InputScript&) const = default;
};

std::string input_to_json_line(const InputEvent& e);
InputEvent input_from_json(std::string_view line, std::size_t index);

struct EngineConfig {
    TechniqueId technique = TechniqueId::outstanding;
    double tick_rate = 30.0;
    OutstandingConfig outstanding;
    TeleportConfig teleport;
    AvatarConfig avatar;
    /// Confine physical walking to a square room of this half-size.
    bool room_clamp = false;
    double room_half_extent = 2.0;

    /// Throws ConfigError when any parameter is out of range.
    void validate() const;
    double dt() const { return 1.0 / tick_rate; }
    const RigConfig& rig() const { return outstanding.rig; }
};

struct Diagnostic {
    std::uint64_t tick = 0;
    std::string message;
};

/// One deterministic play session: world, technique, avatar and the interaction log.
class Session {
public:
    Session(std::shared_ptr<const WorldModel> world, EngineConfig cfg);

    /// Runs exactly one tick. Every event must carry the current tick, else ScriptError.
    /// Technique state errors are recorded as diagnostics and leave the state unchanged.
    void step(std::span<const InputEvent> events);

    /// Appends the session_end record. Further steps are rejected.
    void finish();
    bool finished() const { return finished_; }

    std::uint64_t tick() const { return tick_; }
    double sim_time() const { return static_cast<double>(tick_) / cfg_.tick_rate; }
    const EngineConfig& config() const { return cfg_; }
    const WorldModel& world() const { return *world_; }
    std::shared_ptr<const WorldModel> world_ptr() const { return world_; }
    const AvatarState& avatar() const { return avatar_; }
    const RigState& rig() const;
    /// Outstanding phase; teleport sessions are always in NM.
    Phase phase() const;
    LoggedMode logged_mode() const;
    const OutstandingState& outstanding() const { return outstanding_; }
    const TeleportState& teleport() const { return teleport_; }
    const EventLog& log() const { return log_; }
    const std::vector<Diagnostic>& diagnostics() const { return diagnostics_; }
    double peak_flow() const { return peak_flow_; }
    double last_flow() const { return last_flow_; }
    /// Landing or travel-target preview while aiming.
    std::optional<GroundHit> preview_hit() const;
    bool preview_valid() const;
    /// Eye-to-avatar line of sight is blocked (checked against the avatar's chest).
    bool avatar_occluded() const;

private:
    void apply(const InputEvent& e);
    void apply_move(double dx, double dz);
    void apply_look(double dyaw, double dpitch);
    void press();
    void release();
    void switch_perspective();
    void refresh_preview();
    void log_event(EventKind kind, std::optional<double> dist = std::nullopt);
    void walk_avatar(double dx, double dz);

    std::shared_ptr<const WorldModel> world_;
    EngineConfig cfg_;
    std::uint64_t tick_ = 0;
    AvatarState avatar_;
    OutstandingState outstanding_;
    TeleportState teleport_;
    EventLog log_;
    std::vector<Diagnostic> diagnostics_;
    bool preview_dirty_ = false;
    bool relocated_ = false;
    double command_start_walked_ = 0.0;
    double room_x_ = 0.0;
    double room_z_ = 0.0;
    double peak_flow_ = 0.0;
    double last_flow_ = 0.0;
    bool finished_ = false;
};

/// Starting avatar at the world's start point.
AvatarState initial_avatar(const WorldModel& world);

/// Runs the script to its end tick (or last event), then finishes the session.
/// Throws ScriptError for unsorted events.
const EventLog& run_script(Session& session, const InputScript& script);

}  // namespace vrtravel
