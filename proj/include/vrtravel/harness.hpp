#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "vrtravel/engine.hpp"
#include "vrtravel/metrics.hpp"
#include "vrtravel/rng.hpp"

namespace vrtravel {

/// Knobs shared by both scripted agents.
struct PolicyParams {
    /// Targets at or within this horizontal distance count as reached.
    double arrive_radius = 0.5;
    /// Room-scale reach: targets this close are walked to physically.
    double walk_radius = 2.0;
    /// Physical walking speed of the player, m/s.
    double physical_speed = 1.4;
    /// Trigger hold duration in ticks, drawn uniformly per aim (re-aim cadence).
    int hold_ticks_min = 8;
    int hold_ticks_max = 16;

    // outstanding traveler
    /// Targets farther than this are travelled to in TM.
    double switch_threshold = 40.0;
    bool use_run = false;
    /// Max distance between the aimed ray hit and the target for the aim to count.
    double aim_tolerance = 0.5;

    // teleport chain
    /// Longest hop the agent attempts.
    double max_hop = 40.0;
    /// Hops stop this short of max_hop so refinement error never crosses it.
    double hop_margin = 0.001;
    /// Max distance between the arc landing and the intended landing.
    double landing_tolerance = 0.5;

    /// Give up after this much simulated time.
    double time_limit = 3600.0;
};

/// Scripted stand-in for a study participant. Deterministic given (session state, seed).
class AgentPolicy {
public:
    AgentPolicy(std::vector<Vec3> targets, PolicyParams params, std::uint64_t seed)
        : targets_(std::move(targets)), params_(params), rng_(seed) {}
    virtual ~AgentPolicy() = default;

    /// Inputs for the session's current tick.
    virtual std::vector<InputEvent> decide(const Session& s) = 0;

    bool done() const { return !failure_ && next_target_ >= targets_.size(); }
    const std::optional<std::string>& failure() const { return failure_; }
    std::size_t targets_reached() const { return next_target_; }

protected:
    const Vec3* current_target() const { return next_target_ < targets_.size() ? &targets_[next_target_] : nullptr; }
    /// Skips every target already within the arrival radius.
    void advance_reached(const Vec3& body);
    int draw_hold_ticks();
    /// Room-scale step toward `to`, capped at one tick of walking and the remaining distance.
    InputEvent walk_toward(const Session& s, const Vec3& from, const Vec3& to, double gain) const;
    /// Look event turning the current view onto `dir`.
    static InputEvent look_at(const Session& s, const Vec3& dir);
    void fail(std::string why) { failure_ = std::move(why); }

    std::vector<Vec3> targets_;
    std::size_t next_target_ = 0;
    PolicyParams params_;
    Rng rng_;
    std::optional<std::string> failure_;
};

/// Chains the farthest reachable arc landings toward each target.
class TeleportChainPolicy final : public AgentPolicy {
public:
    using AgentPolicy::AgentPolicy;
    std::vector<InputEvent> decide(const Session& s) override;

    struct Landing {
        Vec3 dir;
        Vec3 point;
    };
    /// Best landing toward `target` from the session's current body position.
    std::optional<Landing> choose_landing(const Session& s, const Vec3& target) const;

private:
    std::optional<std::uint64_t> release_at_;
    bool check_commit_ = false;
    int failed_commits_ = 0;
    std::uint64_t aims_before_ = 0;
};

/// Switches to TM for far targets, aims once, lets the avatar walk, switches back.
class OutstandingTravelerPolicy final : public AgentPolicy {
public:
    using AgentPolicy::AgentPolicy;
    std::vector<InputEvent> decide(const Session& s) override;

private:
    enum class Stage { idle, ascending, scouting, holding, travelling, descending };
    Stage stage_ = Stage::idle;
    std::uint64_t release_at_ = 0;
    int failed_commits_ = 0;
};

std::unique_ptr<AgentPolicy> make_policy(TechniqueId technique, std::vector<Vec3> targets, const PolicyParams& params,
                                         std::uint64_t seed);

struct AgentRun {
    InputScript script;
    EventLog log;
    SessionReport report;
    bool ok = true;
    std::string failure;
    std::size_t targets_reached = 0;
};

/// Drives a session with a policy until the course is done or the policy fails.
/// The inputs are recorded so the run can be replayed with run_script.
AgentRun run_agent(Session& session, AgentPolicy& policy, double time_limit);

/// Convenience: fresh session + policy over the world's targets.
AgentRun run_agent_session(std::shared_ptr<const WorldModel> world, const EngineConfig& cfg,
                           const PolicyParams& params, std::uint64_t policy_seed);

struct ExperimentConfig {
    std::vector<std::uint64_t> seeds{1};
    int repetitions = 1;
    std::vector<TechniqueId> techniques{TechniqueId::outstanding, TechniqueId::teleport};
    WorldSpec world;
    EngineConfig engine;
    PolicyParams policy;
    std::filesystem::path output_dir;
    /// Worker threads; results merge in (seed, technique, repetition) order regardless.
    int jobs = 1;
    /// Write per-session event logs and input scripts.
    bool write_sessions = true;

    void validate() const;
};

struct SessionResult {
    std::uint64_t seed = 0;
    TechniqueId technique = TechniqueId::outstanding;
    int repetition = 0;
    bool ok = true;
    std::string failure;
    SessionReport report;
    std::string events_jsonl;
    std::string script_jsonl;
};

struct ExperimentResult {
    std::vector<SessionResult> sessions;
    std::string sessions_csv;
    std::string comparison_csv;
    std::string histogram_csv;
    bool all_ok() const;
};

/// Seed of the policy RNG for one session.
std::uint64_t policy_seed(std::uint64_t world_seed, TechniqueId technique, int repetition);

/// Runs every (seed x technique x repetition) session, aggregates and, when
/// output_dir is set, writes sessions.csv, comparison.csv, histogram.csv and the
/// per-session logs. Session failures are recorded and the run continues.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

inline constexpr int kCsvSchemaVersion = 1;

}  // namespace vrtravel
