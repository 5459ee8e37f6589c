#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "vomcts/geometry.hpp"

namespace vomcts {

/// Disc robot with kinematic limits, as seen by the velocity-obstacle kernel.
struct RobotDisc {
    Vec2 position;
    double heading = 0.0;   // rad, (-pi, pi]
    double radius = 0.0;    // m
    double v_max = 0.0;     // m/s
    double omega_max = 0.0; // rad/s
};

/// Disc obstacle with a worst-case speed bound.
struct ObstacleDisc {
    Vec2 position;
    double radius = 0.0; // m
    double v_max = 0.0;  // m/s, upper bound on the obstacle's speed
};

/// A static wall, modeled as a segment.
struct WallSegment {
    Vec2 a;
    Vec2 b;
};

/// The collision-free velocity set: safe headings crossed with a speed range.
/// Empty headings force the stationary command (speed range [0, 0]).
/// `stationary_risk` reports an obstacle inside its margin band: standing
/// still there can drop the next step's separation below the stationary
/// threshold, so zero-speed commands should be kept for the no-alternative
/// fallback only.
struct SafeVelocitySet {
    AngularIntervalSet headings;
    double v_lo = 0.0;
    double v_hi = 0.0;
    bool stationary_risk = false;
};

/// One-step reach of the robot and the inflated obstacle ball:
/// r1 = v_max * t_s, r2 = obstacle radius + robot radius + obstacle v_max * t_s.
inline std::pair<double, double> extended_radii(double robot_vmax, double obstacle_radius,
                                                double robot_radius, double obstacle_vmax,
                                                double t_s) {
    return {robot_vmax * t_s, obstacle_radius + robot_radius + obstacle_vmax * t_s};
}

/// Arc of headings from p_R whose rays enter the open ball (center, radius):
/// centered on the bearing to the center, half-width asin(radius / distance).
/// The asin argument is clamped so the arc degenerates to a half circle as the
/// robot approaches the ball surface.
inline Arc tangent_arc(const Vec2& p_R, const Vec2& center, double radius) {
    const double d = (center - p_R).norm();
    if (d <= radius) throw std::domain_error("tangent_arc: point inside ball");
    const double half_width = std::asin(std::min(1.0, radius / d));
    return arc_from_center(bearing(p_R, center), half_width);
}

enum class BlockKind { NoBlock, Blocked, Inside };

struct BlockResult {
    BlockKind kind = BlockKind::NoBlock;
    Arc arc;
};

/// Collision cone of a single obstacle, after worst-case inflation:
/// Inside when the robot center is within the extended ball, NoBlock when the
/// reach ball and the extended ball are disjoint, otherwise the tangent cone.
inline BlockResult blocked_arc_obstacle(const Vec2& p_R, const Vec2& p_i, double r1, double r2) {
    const double d = (p_i - p_R).norm();
    if (d <= r2) return {BlockKind::Inside, {}};
    if (d > r1 + r2) return {BlockKind::NoBlock, {}};
    return {BlockKind::Blocked, tangent_arc(p_R, p_i, r2)};
}

/// Cone of headings toward a wall segment. The segment is clipped to the
/// robot's reach ball; the blocked arc spans the bearings to the clipped
/// extremes, each widened by the angular margin of the inflation radius
/// (the tangent silhouette of the inflated clipped segment).
inline BlockResult blocked_arc_wall(const Vec2& p_R, const WallSegment& wall, double reach,
                                    double inflate) {
    if (wall.a == wall.b) throw std::invalid_argument("blocked_arc_wall: degenerate wall");
    if (reach <= 0.0) throw std::invalid_argument("blocked_arc_wall: reach must be positive");

    if (dist_point_segment(p_R, wall.a, wall.b) <= inflate) {
        return {BlockKind::Blocked, Arc{kPi, kTwoPi}};  // touching already: no safe heading
    }

    double s_lo = 0.0, s_hi = 0.0;
    if (!clip_segment_to_ball(wall.a, wall.b, p_R, reach, s_lo, s_hi)) {
        return {BlockKind::NoBlock, {}};
    }

    const Vec2 dir = wall.b - wall.a;
    const Vec2 e1 = wall.a + dir * s_lo;
    const Vec2 e2 = wall.a + dir * s_hi;
    const double b1 = bearing(p_R, e1);
    const double b2 = bearing(p_R, e2);
    const double d1 = (e1 - p_R).norm();
    const double d2 = (e2 - p_R).norm();
    const double w1 = (inflate > 0.0) ? std::asin(std::min(1.0, inflate / d1)) : 0.0;
    const double w2 = (inflate > 0.0) ? std::asin(std::min(1.0, inflate / d2)) : 0.0;

    // Work in a chart centered on b1; a segment subtends less than pi from any
    // external point, so the relative bearing of e2 is the wrapped difference.
    // The blocked set is the hull of the two endpoint tangent intervals.
    const double rel = angle_diff(b2, b1);
    const double hull_lo = std::min(-w1, rel - w2);
    const double hull_hi = std::max(w1, rel + w2);
    const double width = std::min(hull_hi - hull_lo, kTwoPi);
    return {BlockKind::Blocked, Arc{wrap_angle(b1 + hull_lo), width}};
}

/// Safe headings within the kinematic window [heading - omega_max*t_s,
/// heading + omega_max*t_s].
inline AngularIntervalSet kinematic_arc(const RobotDisc& robot, double t_s) {
    const double half = robot.omega_max * t_s;
    return AngularIntervalSet::interval(robot.heading - half, robot.heading + half);
}

/// Collision-free velocities for one simulation step: the kinematic window
/// minus every obstacle cone and wall cone. When the robot sits inside any
/// extended obstacle ball, or nothing safe remains, the only command left is
/// zero speed.
///
/// `safety_margin` is added to the extended radius r2 used for the cones and
/// their reachability gate, absorbing sensing or speed-bound uncertainty. The
/// stationary (inside-ball) test keeps the un-margined r2: within the margin
/// band the asin argument clamps to 1 and the cone degenerates to the
/// approaching half circle, so receding headings stay available instead of
/// freezing the robot at inflated distances.
inline SafeVelocitySet compute_safe_velocities(const RobotDisc& robot,
                                               std::span<const ObstacleDisc> obstacles,
                                               std::span<const WallSegment> walls, double t_s,
                                               double safety_margin = 0.0) {
    SafeVelocitySet out;
    out.headings = kinematic_arc(robot, t_s);

    const double r1 = robot.v_max * t_s;
    for (const ObstacleDisc& obs : obstacles) {
        const auto [rr1, r2] =
            extended_radii(robot.v_max, obs.radius, robot.radius, obs.v_max, t_s);
        const double r2_cone = r2 + safety_margin;
        const double d = (obs.position - robot.position).norm();
        if (d <= r2) {
            out.headings = AngularIntervalSet::empty_set();
            out.stationary_risk = true;
            break;
        }
        if (d <= r2_cone) out.stationary_risk = true;
        if (d > rr1 + r2_cone) continue;
        const double obstacle_bearing = bearing(robot.position, obs.position);
        const double tangent_half = std::asin(std::min(1.0, r2_cone / d));
        out.headings.subtract(arc_from_center(obstacle_bearing, tangent_half));
        if (rr1 > 0.0) {
            // Endpoint cone: headings whose full-speed endpoint lands within
            // r2_cone of the current center. Subsumed by the tangent cone
            // beyond it, binding inside the margin band, where it keeps the
            // next step's separation above the stationary threshold.
            const double c = std::clamp(
                (d * d + rr1 * rr1 - r2_cone * r2_cone) / (2.0 * d * rr1), -1.0, 1.0);
            const double endpoint_half = std::acos(c);
            if (endpoint_half > 0.0) {
                out.headings.subtract(arc_from_center(obstacle_bearing, endpoint_half));
            }
        }
    }

    if (!out.headings.empty()) {
        const double inflate = robot.radius;
        for (const WallSegment& wall : walls) {
            const BlockResult res = blocked_arc_wall(robot.position, wall, r1 + inflate, inflate);
            if (res.kind == BlockKind::Blocked) out.headings.subtract(res.arc);
            if (out.headings.empty()) break;
        }
    }

    if (out.headings.empty()) {
        out.v_lo = 0.0;
        out.v_hi = 0.0;
    } else {
        out.v_lo = 0.0;
        out.v_hi = robot.v_max;
    }
    return out;
}

}  // namespace vomcts
