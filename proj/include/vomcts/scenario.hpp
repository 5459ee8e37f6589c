#pragma once

#include <cstdint>
#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "vomcts/rng.hpp"
#include "vomcts/world.hpp"

namespace vomcts {

/// Rejects JSON objects carrying keys outside the documented schema.
inline void require_known_keys(const nlohmann::json& j,
                               std::initializer_list<const char*> allowed,
                               const std::string& context) {
    if (!j.is_object()) throw std::invalid_argument(context + ": expected a JSON object");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) {
            throw std::invalid_argument(context + ": unknown key '" + it.key() + "'");
        }
    }
}

/// Everything needed to instantiate one randomized episode world.
struct ScenarioConfig {
    Workspace workspace{0.0, 0.0, 10.0, 10.0};
    int n_obstacles = 40;
    double obstacle_radius = 0.2;
    double robot_radius = 0.3;
    double v_max = 0.3;       // m/s
    double omega_max = 1.9;   // rad/s
    double v_max_o = 0.2;     // m/s, obstacle speed bound
    double t_s = 1.0;         // s
    double r_h = 100.0;       // terminal reward magnitude
    std::uint64_t seed = 0;
    Vec2 robot_start{1.0, 1.0};
    Vec2 goal{9.0, 9.0};

    void validate() const {
        if (workspace.x_max <= workspace.x_min || workspace.y_max <= workspace.y_min) {
            throw std::invalid_argument("scenario: degenerate workspace");
        }
        if (n_obstacles < 0) throw std::invalid_argument("scenario: n_obstacles < 0");
        if (obstacle_radius <= 0.0) throw std::invalid_argument("scenario: obstacle_radius <= 0");
        if (robot_radius <= 0.0) throw std::invalid_argument("scenario: robot_radius <= 0");
        if (v_max <= 0.0) throw std::invalid_argument("scenario: v_max <= 0");
        if (omega_max <= 0.0) throw std::invalid_argument("scenario: omega_max <= 0");
        if (v_max_o < 0.0) throw std::invalid_argument("scenario: v_max_o < 0");
        if (t_s <= 0.0) throw std::invalid_argument("scenario: t_s <= 0");
        if (r_h <= 0.0) throw std::invalid_argument("scenario: r_h <= 0");
        if (!workspace.contains_ball(robot_start, robot_radius)) {
            throw std::invalid_argument("scenario: robot_start outside workspace");
        }
        if (!workspace.contains_ball(goal, robot_radius)) {
            throw std::invalid_argument("scenario: goal outside workspace");
        }
        if ((goal - robot_start).norm() <= robot_radius) {
            throw std::invalid_argument("scenario: start already at goal");
        }
    }
};

/// Builds the initial world for one scenario seed. Obstacle centers are
/// uniform in the workspace, rejection-sampled so nothing overlaps the
/// robot's extended ball or the goal disc at t = 0; waypoints are uniform.
/// The robot starts facing the goal.
inline WorldState generate_scenario(const ScenarioConfig& base, std::uint64_t seed) {
    base.validate();
    WorldState w;
    w.workspace = base.workspace;
    w.goal = base.goal;
    w.robot = RobotState{base.robot_start, bearing(base.robot_start, base.goal),
                         base.robot_radius, base.v_max, base.omega_max};
    w.step_index = 0;

    Rng rng(derive_seed({seed, tag(StreamTag::Scenario)}));
    const double r2 = base.obstacle_radius + base.robot_radius + base.v_max_o * base.t_s;
    w.obstacles.reserve(static_cast<std::size_t>(base.n_obstacles));
    for (int i = 0; i < base.n_obstacles; ++i) {
        ObstacleState o;
        o.radius = base.obstacle_radius;
        o.v_max = base.v_max_o;
        bool placed = false;
        for (int attempt = 0; attempt < 10000; ++attempt) {
            const Vec2 pos{rng.uniform(base.workspace.x_min, base.workspace.x_max),
                           rng.uniform(base.workspace.y_min, base.workspace.y_max)};
            if ((pos - base.robot_start).norm() <= r2 + o.radius) continue;
            if ((pos - base.goal).norm() <= base.robot_radius + o.radius) continue;
            o.position = pos;
            placed = true;
            break;
        }
        if (!placed) {
            throw std::runtime_error("generate_scenario: placement failure, workspace too dense");
        }
        o.goal_waypoint = {rng.uniform(base.workspace.x_min, base.workspace.x_max),
                           rng.uniform(base.workspace.y_min, base.workspace.y_max)};
        w.obstacles.push_back(o);
    }
    return w;
}

inline nlohmann::json scenario_to_json(const ScenarioConfig& c) {
    return nlohmann::json{
        {"workspace", {c.workspace.x_min, c.workspace.y_min, c.workspace.x_max, c.workspace.y_max}},
        {"n_obstacles", c.n_obstacles},
        {"obstacle_radius", c.obstacle_radius},
        {"robot_radius", c.robot_radius},
        {"v_max", c.v_max},
        {"omega_max", c.omega_max},
        {"v_max_o", c.v_max_o},
        {"t_s", c.t_s},
        {"r_h", c.r_h},
        {"seed", c.seed},
        {"robot_start", {c.robot_start.x, c.robot_start.y}},
        {"goal", {c.goal.x, c.goal.y}},
    };
}

inline ScenarioConfig scenario_from_json(const nlohmann::json& j) {
    require_known_keys(j,
                       {"workspace", "n_obstacles", "obstacle_radius", "robot_radius", "v_max",
                        "omega_max", "v_max_o", "t_s", "r_h", "seed", "robot_start", "goal"},
                       "scenario");
    ScenarioConfig c;
    if (j.contains("workspace")) {
        const auto& ws = j.at("workspace");
        if (!ws.is_array() || ws.size() != 4) {
            throw std::invalid_argument("scenario: workspace must be [x_min, y_min, x_max, y_max]");
        }
        c.workspace = Workspace{ws[0].get<double>(), ws[1].get<double>(), ws[2].get<double>(),
                                ws[3].get<double>()};
    }
    if (j.contains("n_obstacles")) c.n_obstacles = j.at("n_obstacles").get<int>();
    if (j.contains("obstacle_radius")) c.obstacle_radius = j.at("obstacle_radius").get<double>();
    if (j.contains("robot_radius")) c.robot_radius = j.at("robot_radius").get<double>();
    if (j.contains("v_max")) c.v_max = j.at("v_max").get<double>();
    if (j.contains("omega_max")) c.omega_max = j.at("omega_max").get<double>();
    if (j.contains("v_max_o")) c.v_max_o = j.at("v_max_o").get<double>();
    if (j.contains("t_s")) c.t_s = j.at("t_s").get<double>();
    if (j.contains("r_h")) c.r_h = j.at("r_h").get<double>();
    if (j.contains("seed")) c.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("robot_start")) {
        const auto& p = j.at("robot_start");
        if (!p.is_array() || p.size() != 2) {
            throw std::invalid_argument("scenario: robot_start must be [x, y]");
        }
        c.robot_start = Vec2{p[0].get<double>(), p[1].get<double>()};
    }
    if (j.contains("goal")) {
        const auto& p = j.at("goal");
        if (!p.is_array() || p.size() != 2) {
            throw std::invalid_argument("scenario: goal must be [x, y]");
        }
        c.goal = Vec2{p[0].get<double>(), p[1].get<double>()};
    }
    c.validate();
    return c;
}

inline ScenarioConfig load_scenario_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("scenario: cannot open file '" + path + "'");
    nlohmann::json j;
    in >> j;
    return scenario_from_json(j);
}

}  // namespace vomcts
