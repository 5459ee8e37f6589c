#pragma once

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "vomcts/episode.hpp"
#include "vomcts/metrics.hpp"
#include "vomcts/planners.hpp"
#include "vomcts/scenario.hpp"

namespace vomcts {

/// Full sweep protocol: a planner roster crossed with simulation budgets,
/// episode counts and the shared scenario base. Scenario seeds are shared
/// across planners and m values so comparisons are paired.
struct SweepConfig {
    ScenarioConfig scenario;
    std::vector<PlannerId> planners{PlannerId::MctsVoTree, PlannerId::Mcts, PlannerId::MctsVo2,
                                    PlannerId::MctsVoRollout, PlannerId::VoPlanner,
                                    PlannerId::Dwa};
    std::vector<int> m_values{10, 25, 50, 100, 200, 400};
    int n_scenarios = 50;
    std::uint64_t master_seed = 0;
    int step_cap = 100;

    // Planner parameters, resolved once for the whole sweep.
    double gamma = 0.7;
    double c_p = 50.0;
    double epsilon0 = 0.2;
    double delta = 1.0;
    int depth_cap = 100;
    int n_speeds = 5;
    int n_angles = 12;
    PlanningModel planning_model = PlanningModel::Frozen;
    double safety_margin = 0.1;  // half the worst-case obstacle step at the defaults
    double rollout_brush = 1.0;
    DwaConfig dwa;

    bool record_timing = true;  // false zeroes t_plan fields for byte-reproducible output
};

inline PlannerConfig planner_config_of(const SweepConfig& cfg, int m) {
    PlannerConfig pc;
    pc.m = m;
    pc.gamma = cfg.gamma;
    pc.c_p = cfg.c_p;
    pc.epsilon0 = cfg.epsilon0;
    pc.delta = cfg.delta;
    pc.depth_cap = cfg.depth_cap;
    pc.n_speeds = cfg.n_speeds;
    pc.n_angles = cfg.n_angles;
    pc.planning_model = cfg.planning_model;
    pc.safety_margin = cfg.safety_margin;
    pc.rollout_brush = cfg.rollout_brush;
    pc.world = WorldParams{cfg.scenario.t_s, cfg.scenario.r_h, cfg.step_cap};
    return pc;
}

inline nlohmann::json sweep_to_json(const SweepConfig& c) {
    nlohmann::json planners = nlohmann::json::array();
    for (PlannerId id : c.planners) planners.push_back(planner_name(id));
    return nlohmann::json{
        {"scenario", scenario_to_json(c.scenario)},
        {"planners", std::move(planners)},
        {"m_values", c.m_values},
        {"n_scenarios", c.n_scenarios},
        {"master_seed", c.master_seed},
        {"step_cap", c.step_cap},
        {"planner_params",
         {{"gamma", c.gamma},
          {"c_p", c.c_p},
          {"epsilon0", c.epsilon0},
          {"delta", c.delta},
          {"depth_cap", c.depth_cap},
          {"n_speeds", c.n_speeds},
          {"n_angles", c.n_angles},
          {"planning_obstacle_model",
           c.planning_model == PlanningModel::Frozen ? "frozen" : "stochastic"},
          {"safety_margin", c.safety_margin},
          {"rollout_brush", c.rollout_brush}}},
        {"dwa",
         {{"w_goal", c.dwa.w_goal},
          {"w_clear", c.dwa.w_clear},
          {"w_vel", c.dwa.w_vel},
          {"clearance_cap", c.dwa.clearance_cap}}},
        {"record_timing", c.record_timing},
    };
}

inline SweepConfig sweep_from_json(const nlohmann::json& j) {
    require_known_keys(j,
                       {"scenario", "planners", "m_values", "n_scenarios", "master_seed",
                        "step_cap", "planner_params", "dwa", "record_timing"},
                       "sweep");
    SweepConfig c;
    if (j.contains("scenario")) c.scenario = scenario_from_json(j.at("scenario"));
    if (j.contains("planners")) {
        c.planners.clear();
        for (const auto& name : j.at("planners")) {
            const auto id = parse_planner_id(name.get<std::string>());
            if (!id) {
                throw std::invalid_argument("sweep: unknown planner '" +
                                            name.get<std::string>() + "'");
            }
            c.planners.push_back(*id);
        }
        if (c.planners.empty()) throw std::invalid_argument("sweep: planners list is empty");
    }
    if (j.contains("m_values")) {
        c.m_values = j.at("m_values").get<std::vector<int>>();
        if (c.m_values.empty()) throw std::invalid_argument("sweep: m_values list is empty");
        for (int m : c.m_values) {
            if (m < 1) throw std::invalid_argument("sweep: m_values must be >= 1");
        }
    }
    if (j.contains("n_scenarios")) {
        c.n_scenarios = j.at("n_scenarios").get<int>();
        if (c.n_scenarios < 1) throw std::invalid_argument("sweep: n_scenarios must be >= 1");
    }
    if (j.contains("master_seed")) c.master_seed = j.at("master_seed").get<std::uint64_t>();
    if (j.contains("step_cap")) c.step_cap = j.at("step_cap").get<int>();
    if (j.contains("planner_params")) {
        const auto& p = j.at("planner_params");
        require_known_keys(p,
                           {"gamma", "c_p", "epsilon0", "delta", "depth_cap", "n_speeds",
                            "n_angles", "planning_obstacle_model", "safety_margin",
                            "rollout_brush"},
                           "sweep.planner_params");
        if (p.contains("gamma")) c.gamma = p.at("gamma").get<double>();
        if (p.contains("c_p")) c.c_p = p.at("c_p").get<double>();
        if (p.contains("epsilon0")) c.epsilon0 = p.at("epsilon0").get<double>();
        if (p.contains("delta")) c.delta = p.at("delta").get<double>();
        if (p.contains("depth_cap")) c.depth_cap = p.at("depth_cap").get<int>();
        if (p.contains("n_speeds")) c.n_speeds = p.at("n_speeds").get<int>();
        if (p.contains("n_angles")) c.n_angles = p.at("n_angles").get<int>();
        if (p.contains("planning_obstacle_model")) {
            const std::string model = p.at("planning_obstacle_model").get<std::string>();
            if (model == "frozen") {
                c.planning_model = PlanningModel::Frozen;
            } else if (model == "stochastic") {
                c.planning_model = PlanningModel::Stochastic;
            } else {
                throw std::invalid_argument("sweep: planning_obstacle_model must be "
                                            "'frozen' or 'stochastic'");
            }
        }
        if (p.contains("safety_margin")) c.safety_margin = p.at("safety_margin").get<double>();
        if (p.contains("rollout_brush")) c.rollout_brush = p.at("rollout_brush").get<double>();
    }
    if (j.contains("dwa")) {
        const auto& d = j.at("dwa");
        require_known_keys(d, {"w_goal", "w_clear", "w_vel", "clearance_cap"}, "sweep.dwa");
        if (d.contains("w_goal")) c.dwa.w_goal = d.at("w_goal").get<double>();
        if (d.contains("w_clear")) c.dwa.w_clear = d.at("w_clear").get<double>();
        if (d.contains("w_vel")) c.dwa.w_vel = d.at("w_vel").get<double>();
        if (d.contains("clearance_cap")) {
            c.dwa.clearance_cap = d.at("clearance_cap").get<double>();
        }
    }
    if (j.contains("record_timing")) c.record_timing = j.at("record_timing").get<bool>();
    c.scenario.validate();
    c.dwa.n_speeds = c.n_speeds;
    c.dwa.n_angles = c.n_angles;
    return c;
}

inline SweepConfig load_sweep_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("sweep: cannot open file '" + path + "'");
    nlohmann::json j;
    in >> j;
    return sweep_from_json(j);
}

struct SweepResult {
    std::vector<EpisodeRecord> records;  // deterministic (planner, m, seed) order
    MetricsSummary summary;
};

/// Scenario seed of episode k under the sweep's master seed.
inline std::uint64_t sweep_scenario_seed(const SweepConfig& cfg, int k) {
    return derive_seed({cfg.master_seed, tag(StreamTag::Scenario), static_cast<std::uint64_t>(k)});
}

/// Runs every (planner, m, scenario) episode. Jobs are embarrassingly
/// parallel; records land in pre-assigned slots so the output is identical
/// for any worker count.
inline SweepResult run_sweep(const SweepConfig& cfg, int jobs = 1) {
    struct Job {
        PlannerId planner;
        int m;
        int k;
    };
    std::vector<Job> job_list;
    for (int m : cfg.m_values) {
        for (PlannerId id : cfg.planners) {
            for (int k = 0; k < cfg.n_scenarios; ++k) job_list.push_back(Job{id, m, k});
        }
    }

    const nlohmann::json resolved = sweep_to_json(cfg);
    SweepResult result;
    result.records.resize(job_list.size());

    std::atomic<std::size_t> next{0};
    const auto worker = [&]() {
        while (true) {
            const std::size_t i = next.fetch_add(1);
            if (i >= job_list.size()) break;
            const Job& job = job_list[i];
            Planner planner(job.planner, planner_config_of(cfg, job.m), cfg.dwa);
            EpisodeOptions opts;
            opts.step_cap = cfg.step_cap;
            opts.record_timing = cfg.record_timing;
            nlohmann::json echo = resolved;
            echo["planner"] = planner_name(job.planner);
            echo["m"] = job.m;
            echo["scenario_index"] = job.k;
            result.records[i] = run_episode(planner, cfg.scenario,
                                            sweep_scenario_seed(cfg, job.k), opts,
                                            std::move(echo));
        }
    };

    const int n_workers = std::max(1, jobs);
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(static_cast<std::size_t>(n_workers));
        for (int t = 0; t < n_workers; ++t) threads.emplace_back(worker);
        for (std::thread& t : threads) t.join();
    }

    result.summary = aggregate(result.records,
                               derive_seed({cfg.master_seed, tag(StreamTag::Bootstrap)}));
    return result;
}

/// Writes summary.csv, raw.jsonl and the per-metric plot tables into out_dir.
inline void write_sweep_outputs(const SweepResult& result, const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    {
        std::ofstream out(fs::path(out_dir) / "summary.csv", std::ios::binary);
        write_summary_csv(result.summary, out);
    }
    {
        std::ofstream out(fs::path(out_dir) / "raw.jsonl", std::ios::binary);
        for (const EpisodeRecord& rec : result.records) {
            out << episode_to_json(rec).dump() << "\n";
        }
    }
    {
        std::ofstream out(fs::path(out_dir) / "plot_rho.csv", std::ios::binary);
        write_plot_csv_rho(result.summary, out);
    }
    {
        std::ofstream out(fs::path(out_dir) / "plot_eta.csv", std::ios::binary);
        write_plot_csv_eta(result.summary, out);
    }
    {
        std::ofstream out(fs::path(out_dir) / "plot_success.csv", std::ios::binary);
        write_plot_csv_success(result.summary, out);
    }
    {
        std::ofstream out(fs::path(out_dir) / "plot_tplan.csv", std::ios::binary);
        write_plot_csv_tplan(result.summary, out);
    }
}

}  // namespace vomcts
