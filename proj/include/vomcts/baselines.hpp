#pragma once

#include <algorithm>
#include <cmath>
#include <limits>

#include "vomcts/mcts.hpp"
#include "vomcts/world.hpp"

namespace vomcts {

/// Reactive velocity-obstacle planner: one draw of the goal-biased
/// epsilon-greedy policy over the current collision-free velocity set.
/// No lookahead; shares its construction with the MCTS rollout policy.
inline VelocityAction vo_planner_decide(const WorldState& s, const WorldParams& params,
                                        double eps0, double delta, double safety_margin,
                                        Rng& rng) {
    SafeVelocitySet safe = safe_velocities(s, params.t_s, safety_margin);
    return sample_policy_action(s, safe.headings, safe.v_hi, eps0, delta, params.t_s, rng);
}

struct DwaConfig {
    double w_goal = 1.0;
    double w_clear = 0.5;
    double w_vel = 0.3;
    double clearance_cap = 1.0;  // clearance (m) that earns the full score
    int n_speeds = 5;
    int n_angles = 12;
};

/// Dynamic-window baseline: scores every action in the discretized window by
/// goal alignment, obstacle clearance along the one-step trajectory, and
/// speed. Actions whose swept path touches an obstacle are excluded; when
/// everything is excluded the robot holds its heading at zero speed.
inline VelocityAction dwa_decide(const WorldState& s, const DwaConfig& cfg,
                                 const WorldParams& params) {
    const auto actions = action_space(s.robot, params.t_s, cfg.n_speeds, cfg.n_angles);
    const double alpha_goal = bearing(s.robot.position, s.goal);

    int best = -1;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < actions.size(); ++i) {
        const VelocityAction& a = actions[i];
        const Vec2 endpoint =
            s.robot.position + unit_from_angle(a.heading) * (a.speed * params.t_s);

        double clearance = std::numeric_limits<double>::infinity();
        bool collides = false;
        for (const ObstacleState& o : s.obstacles) {
            const double d = dist_point_segment(o.position, s.robot.position, endpoint) -
                             (s.robot.radius + o.radius);
            if (d <= 0.0) {
                collides = true;
                break;
            }
            clearance = std::min(clearance, d);
        }
        if (collides) continue;

        const double heading_score = 1.0 - std::abs(angle_diff(alpha_goal, a.heading)) / kPi;
        const double clear_score = std::clamp(clearance / cfg.clearance_cap, 0.0, 1.0);
        const double speed_score = s.robot.v_max > 0.0 ? a.speed / s.robot.v_max : 0.0;
        const double score =
            cfg.w_goal * heading_score + cfg.w_clear * clear_score + cfg.w_vel * speed_score;
        if (score > best_score) {
            best_score = score;
            best = static_cast<int>(i);
        }
    }
    if (best < 0) return {0.0, s.robot.heading};
    return actions[static_cast<std::size_t>(best)];
}

}  // namespace vomcts
