#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "vomcts/geometry.hpp"
#include "vomcts/rng.hpp"
#include "vomcts/vo_kernel.hpp"

namespace vomcts {

/// A self-contained kernel test scene.
struct KernelScene {
    RobotDisc robot;
    std::vector<ObstacleDisc> obstacles;
    std::vector<WallSegment> walls;
    double t_s = 1.0;
    double safety_margin = 0.0;
};

namespace detail {

/// Worst-case admission rule for one heading, evaluated by marching points
/// along the max-speed ray and testing containment directly. No interval
/// algebra and no tangent trigonometry: this is the dual route the kernel is
/// checked against. Obstacles participate only when their extended ball meets
/// the one-step reach ball; participating balls block every heading whose ray
/// enters them, matching the collision-cone definition.
inline bool heading_blocked_brute(const KernelScene& scene, double heading, double time_res) {
    const RobotDisc& r = scene.robot;
    const double r1 = r.v_max * scene.t_s;
    const Vec2 u = unit_from_angle(heading);
    const double dt = time_res > 0.0 ? time_res : scene.t_s / 64.0;
    const double step = r.v_max * dt;

    for (const ObstacleDisc& obs : scene.obstacles) {
        const double r2 = obs.radius + r.radius + obs.v_max * scene.t_s;
        const double r2_cone = r2 + scene.safety_margin;
        const double d = (obs.position - r.position).norm();
        if (d <= r2) return true;  // inside the extended ball: nothing is safe
        if (d > r1 + r2_cone) continue;  // unreachable within one step
        if (r.v_max <= 0.0) continue;
        // Endpoint rule: the full-speed endpoint may not land within r2_cone.
        if ((r.position + u * r1 - obs.position).norm() < r2_cone) return true;
        if (d <= r2_cone) continue;  // margin band: only the endpoint rule applies
        // The ray can only be inside the ball for travel in [d - r2c, d + r2c].
        const double s_begin = std::max(0.0, d - r2_cone);
        const double s_end = d + r2_cone;
        for (double s = s_begin; s <= s_end; s += step) {
            if ((r.position + u * s - obs.position).norm() < r2_cone) return true;
        }
    }

    const double inflate = r.radius;
    const double reach = r1 + inflate;
    for (const WallSegment& wall : scene.walls) {
        if (dist_point_segment(r.position, wall.a, wall.b) <= inflate) return true;
        double s_lo = 0.0, s_hi = 0.0;
        if (!clip_segment_to_ball(wall.a, wall.b, r.position, reach, s_lo, s_hi)) continue;
        if (r.v_max <= 0.0) continue;
        const Vec2 e1 = wall.a + (wall.b - wall.a) * s_lo;
        const Vec2 e2 = wall.a + (wall.b - wall.a) * s_hi;
        const double s_end = reach + inflate;
        for (double s = 0.0; s <= s_end; s += step) {
            if (dist_point_segment(r.position + u * s, e1, e2) < inflate) return true;
        }
    }
    return false;
}

}  // namespace detail

/// Brute-force reference for compute_safe_velocities: samples headings across
/// the kinematic window at `angular_resolution`, classifies each one with
/// detail::heading_blocked_brute (`time_resolution` sets the marching step),
/// and returns the safe samples assembled into intervals. Agreement with the
/// kernel is expected up to the sampling resolution at arc boundaries.
inline AngularIntervalSet brute_force_safe_headings(const RobotDisc& robot,
                                                    const std::vector<ObstacleDisc>& obstacles,
                                                    const std::vector<WallSegment>& walls,
                                                    double t_s, double angular_resolution,
                                                    double time_resolution,
                                                    double safety_margin = 0.0) {
    const KernelScene scene{robot, obstacles, walls, t_s, safety_margin};
    const double half = robot.omega_max * t_s;
    const double width = std::min(2.0 * half, kTwoPi);
    const double lo = robot.heading - std::min(half, kPi);
    const int n = std::max(1, static_cast<int>(std::ceil(width / angular_resolution)));

    std::vector<Arc> safe_runs;
    bool in_run = false;
    double run_start = 0.0, run_end = 0.0;
    for (int k = 0; k <= n; ++k) {
        const double alpha = lo + width * static_cast<double>(k) / n;
        const bool safe = !detail::heading_blocked_brute(scene, alpha, time_resolution);
        if (safe) {
            if (!in_run) {
                in_run = true;
                run_start = alpha;
            }
            run_end = alpha;
        } else if (in_run) {
            safe_runs.push_back(Arc{wrap_angle(run_start), run_end - run_start});
            in_run = false;
        }
    }
    if (in_run) safe_runs.push_back(Arc{wrap_angle(run_start), run_end - run_start});
    return AngularIntervalSet::from_arcs(safe_runs);
}

struct SceneCheckResult {
    long headings_checked = 0;
    long mismatches = 0;          // kernel vs brute-force disagreements beyond boundary slack
    long soundness_checked = 0;
    long soundness_violations = 0; // kernel-safe heading that truly enters an extended ball
};

namespace detail {

inline double min_boundary_distance(const std::vector<double>& boundaries, double angle) {
    double best = kPi;
    for (double b : boundaries) {
        best = std::min(best, std::abs(angle_diff(angle, b)));
    }
    return best;
}

/// Dense-time soundness probe: traverse `heading` at v_max for t_s and check
/// the robot center stays outside every extended ball and off every inflated
/// wall. The extended radius here is the physical one (no margin): it is what
/// worst-case obstacle motion can actually reach within the step.
inline bool heading_travel_breaches(const KernelScene& scene, double heading, double dt) {
    const RobotDisc& r = scene.robot;
    const Vec2 u = unit_from_angle(heading);
    for (double t = 0.0; t <= scene.t_s + 1e-12; t += dt) {
        const Vec2 q = r.position + u * (r.v_max * t);
        for (const ObstacleDisc& obs : scene.obstacles) {
            const double r2 = obs.radius + r.radius + obs.v_max * scene.t_s;
            if ((q - obs.position).norm() < r2) return true;
        }
        for (const WallSegment& wall : scene.walls) {
            if (dist_point_segment(q, wall.a, wall.b) < r.radius) return true;
        }
    }
    return false;
}

}  // namespace detail

/// Kernel-vs-brute-force comparison on one scene, plus the dense-time
/// soundness probe on headings the kernel declares safe. Disagreements within
/// `2 * angular_resolution` of an arc boundary are sampling artifacts and not
/// counted.
inline SceneCheckResult check_scene(const KernelScene& scene, double angular_resolution,
                                    double time_resolution) {
    SceneCheckResult out;
    const RobotDisc& r = scene.robot;
    const SafeVelocitySet kernel = compute_safe_velocities(
        r, scene.obstacles, scene.walls, scene.t_s, scene.safety_margin);

    const double half = r.omega_max * scene.t_s;
    const double width = std::min(2.0 * half, kTwoPi);
    const double lo = r.heading - std::min(half, kPi);
    const int n = std::max(1, static_cast<int>(std::ceil(width / angular_resolution)));

    const AngularIntervalSet brute =
        brute_force_safe_headings(r, scene.obstacles, scene.walls, scene.t_s, angular_resolution,
                                  time_resolution, scene.safety_margin);
    std::vector<double> boundaries = kernel.headings.boundaries();
    for (double b : brute.boundaries()) boundaries.push_back(b);

    for (int k = 0; k <= n; ++k) {
        const double alpha = lo + width * static_cast<double>(k) / n;
        const bool kernel_safe = kernel.headings.contains(alpha, 1e-12);
        const bool brute_safe =
            !detail::heading_blocked_brute(scene, alpha, time_resolution);
        ++out.headings_checked;
        if (kernel_safe != brute_safe &&
            detail::min_boundary_distance(boundaries, alpha) > 2.0 * angular_resolution) {
            ++out.mismatches;
        }
    }

    // Soundness: interior samples of the kernel set plus points nudged just
    // inside each boundary must survive dense-time travel checks.
    if (!kernel.headings.empty()) {
        const double dt = scene.t_s / 1000.0;
        std::vector<double> probes;
        const int n_uniform = 24;
        for (int k = 0; k < n_uniform; ++k) {
            probes.push_back(kernel.headings.sample_at((k + 0.5) / n_uniform));
        }
        for (const Arc& a : kernel.headings.arcs()) {
            if (a.width > 6.0 * angular_resolution) {
                probes.push_back(wrap_angle(a.start + 2.0 * angular_resolution));
                probes.push_back(wrap_angle(a.start + a.width - 2.0 * angular_resolution));
            }
        }
        const auto kernel_bounds = kernel.headings.boundaries();
        for (double alpha : probes) {
            if (detail::min_boundary_distance(kernel_bounds, alpha) <= angular_resolution) {
                continue;  // boundary slack granted by the property definition
            }
            ++out.soundness_checked;
            if (detail::heading_travel_breaches(scene, alpha, dt)) ++out.soundness_violations;
        }
    }
    return out;
}

/// Randomized scene with distances biased into the interesting range so the
/// Inside / Blocked / NoBlock branches all occur.
inline KernelScene random_scene(Rng& rng, int max_obstacles = 10, int max_walls = 2) {
    KernelScene scene;
    scene.robot.position = {0.0, 0.0};
    scene.robot.heading = rng.uniform(-kPi, kPi);
    scene.robot.radius = 0.3;
    scene.robot.v_max = 0.3;
    scene.robot.omega_max = rng.uniform(0.3, 3.5);
    scene.t_s = 1.0;
    scene.safety_margin = rng.uniform01() < 0.5 ? 0.0 : rng.uniform(0.0, 0.2);

    const int n_obs = static_cast<int>(rng.pick(static_cast<std::size_t>(max_obstacles) + 1));
    for (int i = 0; i < n_obs; ++i) {
        ObstacleDisc o;
        o.radius = rng.uniform(0.05, 0.4);
        o.v_max = rng.uniform(0.0, 0.3);
        // Mostly outside the extended ball, so cone subtraction gets exercised;
        // a minority lands inside to cover the stationary branch.
        const double d = rng.uniform01() < 0.15 ? rng.uniform(0.05, 1.0) : rng.uniform(0.6, 1.9);
        o.position = unit_from_angle(rng.uniform(-kPi, kPi)) * d;
        scene.obstacles.push_back(o);
    }
    const int n_walls = static_cast<int>(rng.pick(static_cast<std::size_t>(max_walls) + 1));
    for (int i = 0; i < n_walls; ++i) {
        const Vec2 center = unit_from_angle(rng.uniform(-kPi, kPi)) * rng.uniform(0.1, 1.5);
        const Vec2 dir = unit_from_angle(rng.uniform(-kPi, kPi));
        const double half_len = rng.uniform(0.1, 1.5);
        scene.walls.push_back(WallSegment{center - dir * half_len, center + dir * half_len});
    }
    return scene;
}

struct OracleSuiteResult {
    long scenes = 0;
    long headings_checked = 0;
    long mismatches = 0;
    long soundness_checked = 0;
    long soundness_violations = 0;

    bool passed() const { return mismatches == 0 && soundness_violations == 0; }
};

/// Full randomized equivalence + soundness sweep over `n_scenes` scenes.
inline OracleSuiteResult run_oracle_suite(long n_scenes, std::uint64_t seed,
                                          double angular_resolution = 0.004,
                                          double time_resolution = 1.0 / 64.0) {
    OracleSuiteResult total;
    Rng rng(seed);
    for (long i = 0; i < n_scenes; ++i) {
        const KernelScene scene = random_scene(rng);
        const SceneCheckResult r = check_scene(scene, angular_resolution, time_resolution);
        ++total.scenes;
        total.headings_checked += r.headings_checked;
        total.mismatches += r.mismatches;
        total.soundness_checked += r.soundness_checked;
        total.soundness_violations += r.soundness_violations;
    }
    return total;
}

}  // namespace vomcts
