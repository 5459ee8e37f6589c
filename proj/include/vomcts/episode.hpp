#pragma once

#include <cmath>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vomcts/planners.hpp"
#include "vomcts/scenario.hpp"

namespace vomcts {

/// Flat numeric snapshot of a world state, field order documented in the README:
/// [robot_x, robot_y, robot_heading, obs0_x, obs0_y, obs1_x, obs1_y, ...].
inline std::vector<double> snapshot(const WorldState& s) {
    std::vector<double> v;
    v.reserve(3 + 2 * s.obstacles.size());
    v.push_back(s.robot.position.x);
    v.push_back(s.robot.position.y);
    v.push_back(s.robot.heading);
    for (const ObstacleState& o : s.obstacles) {
        v.push_back(o.position.x);
        v.push_back(o.position.y);
    }
    return v;
}

struct StepLog {
    std::vector<double> state;  // snapshot before the action
    VelocityAction action;
    double reward = 0.0;
    double t_plan = 0.0;  // seconds spent deciding this step
};

struct EpisodeRecord {
    std::uint64_t scenario_seed = 0;
    std::string planner;
    int m = 0;
    double gamma = 0.7;
    Cause outcome = Cause::None;
    int steps = 0;
    double rho = 0.0;  // discounted return, sum gamma^k * r_{k+1}
    std::vector<StepLog> step_log;
    std::vector<double> final_state;
    nlohmann::json config_echo;                // resolved configuration used
    std::vector<nlohmann::json> diagnostics;   // optional per-step planner diagnostics
};

struct EpisodeOptions {
    int step_cap = 100;
    bool record_timing = true;
    bool keep_diagnostics = false;
};

inline nlohmann::json diagnostics_to_json(const PlanDiagnostics& d) {
    nlohmann::json root = nlohmann::json::array();
    for (const RootStat& rs : d.root_stats) {
        root.push_back({{"index", rs.action_index},
                        {"v", rs.action.speed},
                        {"alpha", rs.action.heading},
                        {"q", rs.q},
                        {"n", rs.n}});
    }
    return nlohmann::json{{"t_plan", d.t_plan},
                          {"m", d.m},
                          {"c_p", d.c_p},
                          {"chosen", {d.chosen.speed, d.chosen.heading}},
                          {"root_q", std::move(root)}};
}

/// Runs one full episode: the planner decides, the environment steps with the
/// replayable noise model, and the true environment adjudicates termination.
inline EpisodeRecord run_episode(const Planner& planner, const ScenarioConfig& base,
                                 std::uint64_t scenario_seed, EpisodeOptions opts = {},
                                 nlohmann::json config_echo = nlohmann::json::object()) {
    WorldState s = generate_scenario(base, scenario_seed);
    const std::uint64_t noise_seed = derive_seed({scenario_seed, tag(StreamTag::Noise)});
    Rng planner_rng(derive_seed({scenario_seed, tag(StreamTag::Planner),
                                 static_cast<std::uint64_t>(planner.id())}));
    const WorldParams params{base.t_s, base.r_h, opts.step_cap};

    EpisodeRecord rec;
    rec.scenario_seed = scenario_seed;
    rec.planner = planner_name(planner.id());
    rec.m = planner.config().m;
    rec.gamma = planner.config().gamma;
    rec.config_echo = std::move(config_echo);

    while (true) {
        Decision dec = planner.decide(s, planner_rng);
        StepOutcome out = world_step(s, dec.action, ReplayModel{noise_seed}, params);
        rec.step_log.push_back(StepLog{snapshot(s), dec.action, out.reward,
                                       opts.record_timing ? dec.diagnostics.t_plan : 0.0});
        if (opts.keep_diagnostics) {
            rec.diagnostics.push_back(diagnostics_to_json(dec.diagnostics));
        }
        s = std::move(out.next_state);
        if (out.terminal) {
            rec.outcome = out.cause;
            break;
        }
    }
    rec.final_state = snapshot(s);
    rec.steps = static_cast<int>(rec.step_log.size());
    double disc = 1.0;
    for (const StepLog& step : rec.step_log) {
        rec.rho += disc * step.reward;
        disc *= rec.gamma;
    }
    return rec;
}

/// Discounted return recomputed from the per-step log.
inline double recompute_rho(const EpisodeRecord& rec) {
    double total = 0.0;
    double disc = 1.0;
    for (const StepLog& step : rec.step_log) {
        total += disc * step.reward;
        disc *= rec.gamma;
    }
    return total;
}

inline nlohmann::json episode_to_json(const EpisodeRecord& rec) {
    nlohmann::json steps = nlohmann::json::array();
    for (const StepLog& s : rec.step_log) {
        steps.push_back({{"state", s.state},
                         {"action", {s.action.speed, s.action.heading}},
                         {"reward", s.reward},
                         {"tplan", s.t_plan}});
    }
    nlohmann::json j{{"schema", "vomcts.episode.v1"},
                     {"scenario_seed", rec.scenario_seed},
                     {"planner", rec.planner},
                     {"m", rec.m},
                     {"gamma", rec.gamma},
                     {"outcome", cause_name(rec.outcome)},
                     {"steps", rec.steps},
                     {"rho", rec.rho},
                     {"step_log", std::move(steps)},
                     {"final_state", rec.final_state},
                     {"config", rec.config_echo}};
    if (!rec.diagnostics.empty()) j["diagnostics"] = rec.diagnostics;
    return j;
}

inline Cause cause_from_name(const std::string& name) {
    for (Cause c : {Cause::GoalReached, Cause::OutOfBounds, Cause::Collision, Cause::StepLimit,
                    Cause::None}) {
        if (name == cause_name(c)) return c;
    }
    throw std::invalid_argument("episode: unknown outcome '" + name + "'");
}

inline EpisodeRecord episode_from_json(const nlohmann::json& j) {
    EpisodeRecord rec;
    rec.scenario_seed = j.at("scenario_seed").get<std::uint64_t>();
    rec.planner = j.at("planner").get<std::string>();
    rec.m = j.at("m").get<int>();
    rec.gamma = j.at("gamma").get<double>();
    rec.outcome = cause_from_name(j.at("outcome").get<std::string>());
    rec.steps = j.at("steps").get<int>();
    rec.rho = j.at("rho").get<double>();
    for (const auto& s : j.at("step_log")) {
        StepLog step;
        step.state = s.at("state").get<std::vector<double>>();
        step.action = VelocityAction{s.at("action")[0].get<double>(),
                                     s.at("action")[1].get<double>()};
        step.reward = s.at("reward").get<double>();
        step.t_plan = s.at("tplan").get<double>();
        rec.step_log.push_back(std::move(step));
    }
    rec.final_state = j.at("final_state").get<std::vector<double>>();
    if (j.contains("config")) rec.config_echo = j.at("config");
    if (j.contains("diagnostics")) {
        rec.diagnostics = j.at("diagnostics").get<std::vector<nlohmann::json>>();
    }
    return rec;
}

/// Trajectory CSV for one episode: a row per step with the pre-action state
/// and the reward received, then a final row for the terminal state.
inline void write_trajectory_csv(const EpisodeRecord& rec, std::ostream& out) {
    const std::size_t n_obs = rec.step_log.empty()
                                  ? (rec.final_state.size() - 3) / 2
                                  : (rec.step_log.front().state.size() - 3) / 2;
    out << "t,x,y,heading,reward";
    for (std::size_t i = 0; i < n_obs; ++i) out << ",o" << i << "x,o" << i << "y";
    out << "\n";
    char buf[64];
    const auto emit = [&](double v) {
        std::snprintf(buf, sizeof(buf), "%.12g", v);
        out << buf;
    };
    for (std::size_t k = 0; k < rec.step_log.size(); ++k) {
        const StepLog& s = rec.step_log[k];
        out << k << ",";
        emit(s.state[0]);
        out << ",";
        emit(s.state[1]);
        out << ",";
        emit(s.state[2]);
        out << ",";
        emit(s.reward);
        for (std::size_t i = 0; i < n_obs; ++i) {
            out << ",";
            emit(s.state[3 + 2 * i]);
            out << ",";
            emit(s.state[4 + 2 * i]);
        }
        out << "\n";
    }
    out << rec.step_log.size() << ",";
    emit(rec.final_state[0]);
    out << ",";
    emit(rec.final_state[1]);
    out << ",";
    emit(rec.final_state[2]);
    out << ",";
    emit(0.0);
    for (std::size_t i = 0; i < n_obs; ++i) {
        out << ",";
        emit(rec.final_state[3 + 2 * i]);
        out << ",";
        emit(rec.final_state[4 + 2 * i]);
    }
    out << "\n";
}

}  // namespace vomcts
