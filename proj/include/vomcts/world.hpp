#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <variant>
#include <vector>

#include "vomcts/geometry.hpp"
#include "vomcts/rng.hpp"
#include "vomcts/vo_kernel.hpp"

namespace vomcts {

struct RobotState {
    Vec2 position;
    double heading = 0.0;    // rad, (-pi, pi]
    double radius = 0.3;     // m
    double v_max = 0.3;      // m/s
    double omega_max = 1.9;  // rad/s
};

struct ObstacleState {
    Vec2 position;
    double radius = 0.2;  // m
    double v_max = 0.2;   // m/s, worst-case bound known to the planner
    Vec2 goal_waypoint;   // simulator-private: obstacles drift toward this
};

struct Workspace {
    double x_min = 0.0;
    double y_min = 0.0;
    double x_max = 10.0;
    double y_max = 10.0;

    double diagonal() const { return std::hypot(x_max - x_min, y_max - y_min); }

    bool contains_ball(const Vec2& c, double r) const {
        return c.x - r >= x_min && c.x + r <= x_max && c.y - r >= y_min && c.y + r <= y_max;
    }
};

/// Full MDP state. Plain value type: copies are independent, which the tree
/// search relies on.
struct WorldState {
    RobotState robot;
    std::vector<ObstacleState> obstacles;
    Vec2 goal;
    Workspace workspace;
    int step_index = 0;
};

/// A velocity command <speed, heading>. Heading is kept unwrapped so kinematic
/// window membership is checked against the issuing state.
struct VelocityAction {
    double speed = 0.0;
    double heading = 0.0;
};

enum class Cause { None, GoalReached, OutOfBounds, Collision, StepLimit };

inline const char* cause_name(Cause c) {
    switch (c) {
        case Cause::GoalReached: return "goal_reached";
        case Cause::OutOfBounds: return "out_of_bounds";
        case Cause::Collision: return "collision";
        case Cause::StepLimit: return "step_limit";
        case Cause::None: return "none";
    }
    return "none";
}

struct StepOutcome {
    WorldState next_state;
    double reward = 0.0;
    bool terminal = false;
    Cause cause = Cause::None;
};

/// Shared step parameters of the simulated MDP.
struct WorldParams {
    double t_s = 1.0;    // s, discrete motion step
    double r_h = 100.0;  // terminal reward magnitude
    int step_cap = 100;  // episode and simulation depth limit
};

inline RobotDisc robot_disc(const RobotState& r) {
    return RobotDisc{r.position, r.heading, r.radius, r.v_max, r.omega_max};
}

inline std::vector<ObstacleDisc> obstacle_discs(const WorldState& s) {
    std::vector<ObstacleDisc> discs;
    discs.reserve(s.obstacles.size());
    for (const ObstacleState& o : s.obstacles) {
        discs.push_back(ObstacleDisc{o.position, o.radius, o.v_max});
    }
    return discs;
}

/// The workspace boundary as four wall segments for the velocity-obstacle
/// kernel. With the wall inflation equal to the robot radius, the wall cones
/// block exactly the headings whose one-step path would take the robot ball
/// out of the workspace.
inline std::vector<WallSegment> boundary_walls(const Workspace& ws) {
    const Vec2 a{ws.x_min, ws.y_min};
    const Vec2 b{ws.x_max, ws.y_min};
    const Vec2 c{ws.x_max, ws.y_max};
    const Vec2 d{ws.x_min, ws.y_max};
    return {WallSegment{a, b}, WallSegment{b, c}, WallSegment{c, d}, WallSegment{d, a}};
}

/// Collision-free velocity set of a world state: obstacle cones plus the
/// workspace boundary treated as walls.
inline SafeVelocitySet safe_velocities(const WorldState& s, double t_s,
                                       double safety_margin = 0.0) {
    const auto discs = obstacle_discs(s);
    const auto walls = boundary_walls(s.workspace);
    return compute_safe_velocities(robot_disc(s.robot), discs, walls, t_s, safety_margin);
}

inline std::vector<double> linspace(double lo, double hi, int n) {
    std::vector<double> v;
    v.reserve(static_cast<std::size_t>(n));
    if (n == 1) {
        v.push_back(0.5 * (lo + hi));
        return v;
    }
    for (int i = 0; i < n; ++i) {
        v.push_back(i == n - 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / (n - 1));
    }
    return v;
}

/// Discretized action set: n_speeds speeds spanning [0, v_max] crossed with
/// n_angles headings spanning the kinematic window. Zero-speed entries are the
/// in-place rotations. Index order is speed blocks descending from v_max, and
/// headings center-out from the current heading within each block, so that
/// index-ordered exploration probes straight fast motion first, widening turns
/// next, and in-place rotations last.
inline std::vector<VelocityAction> action_space(const RobotState& robot, double t_s, int n_speeds,
                                                int n_angles) {
    if (n_speeds < 2) throw std::invalid_argument("action_space: n_speeds must be >= 2");
    if (n_angles < 1) throw std::invalid_argument("action_space: n_angles must be >= 1");
    const double half = robot.omega_max * t_s;
    const std::vector<double> speeds = linspace(0.0, robot.v_max, n_speeds);
    std::vector<double> headings = linspace(robot.heading - half, robot.heading + half, n_angles);
    std::sort(headings.begin(), headings.end(), [&](double a, double b) {
        const double da = std::abs(a - robot.heading);
        const double db = std::abs(b - robot.heading);
        if (da != db) return da < db;
        return a < b;
    });
    std::vector<VelocityAction> actions;
    actions.reserve(speeds.size() * headings.size());
    for (auto it = speeds.rbegin(); it != speeds.rend(); ++it) {
        for (double alpha : headings) {
            bool duplicate = false;
            for (const VelocityAction& prev : actions) {
                if (prev.speed == *it &&
                    std::abs(angle_diff(prev.heading, alpha)) < 1e-12) {
                    duplicate = true;
                    break;
                }
            }
            if (!duplicate) actions.push_back(VelocityAction{*it, alpha});
        }
    }
    return actions;
}

/// True when the action lies in the collision-free product set
/// V_c x A_c: heading inside the safe arcs, speed inside the range.
/// Zero-speed commands additionally require no stationary risk; parking while
/// an obstacle sits inside its margin band is how the robot ends up frozen in
/// the path of an approaching obstacle.
inline bool action_admissible(const VelocityAction& a, const SafeVelocitySet& safe) {
    if (a.speed == 0.0 && safe.stationary_risk) return false;
    if (a.speed < safe.v_lo - 1e-12 || a.speed > safe.v_hi + 1e-12) return false;
    return safe.headings.contains(a.heading);
}

/// Velocity-obstacle pruning of a discretized action list. When no safe
/// headings exist, or pruning empties the list (safe arcs can fall between
/// the discretized headings), the in-place rotations survive as the
/// stationary fallback: zero speed is collision-free one step ahead.
inline std::vector<VelocityAction> restrict_actions(const std::vector<VelocityAction>& actions,
                                                    const SafeVelocitySet& safe) {
    std::vector<VelocityAction> out;
    out.reserve(actions.size());
    if (!safe.headings.empty()) {
        for (const VelocityAction& a : actions) {
            if (action_admissible(a, safe)) out.push_back(a);
        }
    }
    if (out.empty()) {
        for (const VelocityAction& a : actions) {
            if (a.speed == 0.0) out.push_back(a);
        }
    }
    return out;
}

/// Reward branches evaluated on an arrival state, in priority order:
/// goal > out-of-bounds > collision > normalized goal distance.
inline std::pair<double, Cause> classify_arrival(const WorldState& arrived, double r_h,
                                                 double d_max) {
    const RobotState& r = arrived.robot;
    if ((arrived.goal - r.position).norm() < r.radius) return {r_h, Cause::GoalReached};
    if (!arrived.workspace.contains_ball(r.position, r.radius)) {
        return {-r_h, Cause::OutOfBounds};
    }
    for (const ObstacleState& o : arrived.obstacles) {
        if ((o.position - r.position).norm() < r.radius + o.radius) {
            return {-r_h, Cause::Collision};
        }
    }
    return {-(r.position - arrived.goal).norm() / d_max, Cause::None};
}

/// How a simulated step adjudicates rewards. Rollout walks demote the
/// collision branch from a terminal -R_h to a small non-terminal brush cost:
/// under the frozen planning model obstacle coincidence is a phantom of the
/// walker, not a prediction. Terminal-size penalties in the tails swamp the
/// distance shaping and the search retreats from any direction crossing the
/// field; zero cost hides clutter entirely. In-tree transitions always carry
/// the full reward.
enum class RewardMode { Full, RolloutWalk };

inline std::pair<double, Cause> reward(const WorldState& /*s*/, const VelocityAction& /*a*/,
                                       const WorldState& s_next, double r_h, double d_max) {
    return classify_arrival(s_next, r_h, d_max);
}

/// Deterministic robot transition: translate along the commanded heading and
/// adopt it. Throws when the heading falls outside the kinematic window.
inline RobotState robot_step(const RobotState& robot, const VelocityAction& a, double t_s) {
    const double half = robot.omega_max * t_s;
    if (half < kPi - 1e-12 &&
        std::abs(angle_diff(a.heading, robot.heading)) > half + 1e-9) {
        throw std::domain_error("robot_step: heading outside kinematic window");
    }
    RobotState next = robot;
    next.position = robot.position + unit_from_angle(a.heading) * (a.speed * t_s);
    next.heading = wrap_angle(a.heading);
    return next;
}

/// Environment obstacle motion: signed speed uniform in [-v_max/2, +v_max/2]
/// along the bearing to the obstacle's waypoint plus uniform heading noise in
/// [-0.05, 0.05]; the waypoint is redrawn uniformly once reached.
inline void obstacle_step_in_place(ObstacleState& o, double t_s, const Workspace& ws, Rng& rng) {
    if ((o.goal_waypoint - o.position).norm() < o.radius) {
        o.goal_waypoint = {rng.uniform(ws.x_min, ws.x_max), rng.uniform(ws.y_min, ws.y_max)};
    }
    const double u = rng.uniform(-0.5 * o.v_max, 0.5 * o.v_max);
    const double h = bearing(o.position, o.goal_waypoint) + rng.uniform(-0.05, 0.05);
    o.position = o.position + unit_from_angle(h) * (u * t_s);
}

inline ObstacleState obstacle_step(const ObstacleState& o, double t_s, const Workspace& ws,
                                   Rng& rng) {
    ObstacleState next = o;
    obstacle_step_in_place(next, t_s, ws, rng);
    return next;
}

/// Obstacle motion models for world_step.
///  - Frozen: obstacles hold position (planner-internal default; safety comes
///    from the worst-case inflation in the velocity-obstacle kernel).
///  - Stochastic: draws from a caller-owned stream (planner-internal option).
///  - Replay: the environment model; noise is keyed by (seed, step, obstacle)
///    so a trajectory is a pure function of its seeds, independent of the
///    planner under test.
struct FrozenModel {};
struct StochasticModel {
    Rng* rng = nullptr;
};
struct ReplayModel {
    std::uint64_t noise_seed = 0;
};
using ObstacleModel = std::variant<FrozenModel, StochasticModel, ReplayModel>;

namespace detail {

inline void advance_obstacles(WorldState& s, const ObstacleModel& model, double t_s) {
    if (std::holds_alternative<FrozenModel>(model)) return;
    if (const auto* st = std::get_if<StochasticModel>(&model)) {
        for (ObstacleState& o : s.obstacles) {
            obstacle_step_in_place(o, t_s, s.workspace, *st->rng);
        }
        return;
    }
    const auto& replay = std::get<ReplayModel>(model);
    for (std::size_t j = 0; j < s.obstacles.size(); ++j) {
        Rng stream(derive_seed({replay.noise_seed, static_cast<std::uint64_t>(s.step_index),
                                static_cast<std::uint64_t>(j)}));
        obstacle_step_in_place(s.obstacles[j], t_s, s.workspace, stream);
    }
}

/// Advances `s` one step in place. Returns the reward and cause; used by both
/// world_step and the rollout hot path.
inline std::pair<double, Cause> advance_in_place(WorldState& s, const VelocityAction& a,
                                                 const ObstacleModel& model,
                                                 const WorldParams& params,
                                                 RewardMode mode = RewardMode::Full,
                                                 double brush_cost = 0.0) {
    s.robot = robot_step(s.robot, a, params.t_s);
    advance_obstacles(s, model, params.t_s);
    s.step_index += 1;
    auto [r, cause] = classify_arrival(s, params.r_h, s.workspace.diagonal());
    if (mode == RewardMode::RolloutWalk && cause == Cause::Collision) {
        cause = Cause::None;
        r = -(s.robot.position - s.goal).norm() / s.workspace.diagonal() - brush_cost;
    }
    if (cause == Cause::None && s.step_index >= params.step_cap) cause = Cause::StepLimit;
    return {r, cause};
}

}  // namespace detail

inline StepOutcome world_step(const WorldState& s, const VelocityAction& a,
                              const ObstacleModel& model, const WorldParams& params) {
    StepOutcome out;
    out.next_state = s;
    auto [r, cause] = detail::advance_in_place(out.next_state, a, model, params);
    out.reward = r;
    out.cause = cause;
    out.terminal = cause != Cause::None;
    return out;
}

/// Terminal classification of a standing state (used before simulating from it).
inline Cause state_cause(const WorldState& s, const WorldParams& params) {
    auto [r, cause] = classify_arrival(s, params.r_h, s.workspace.diagonal());
    (void)r;
    if (cause == Cause::None && s.step_index >= params.step_cap) return Cause::StepLimit;
    return cause;
}

inline bool is_terminal_state(const WorldState& s, const WorldParams& params) {
    return state_cause(s, params) != Cause::None;
}

}  // namespace vomcts
