// Command-line front end: single episodes, sweeps, trajectory replay and the
// velocity-obstacle kernel check suite.

#include <cstdio>
#include <exception>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "vomcts/episode.hpp"
#include "vomcts/planners.hpp"
#include "vomcts/safety_oracle.hpp"
#include "vomcts/scenario.hpp"
#include "vomcts/sweep.hpp"

namespace {

struct RunArgs {
    std::string scenario_file;
    std::string planner;
    int m = 100;
    std::optional<std::uint64_t> seed;
    int step_cap = 100;
    double gamma = 0.7;
    double c_p = 50.0;
    double epsilon0 = 0.2;
    double delta = 1.0;
    int depth_cap = 100;
    int n_speeds = 5;
    int n_angles = 12;
    double safety_margin = 0.1;
    double rollout_brush = 1.0;
    std::string planning_model = "frozen";
    bool no_diagnostics = false;
};

int do_run(const RunArgs& args) {
    const auto id = vomcts::parse_planner_id(args.planner);
    if (!id) {
        std::cerr << "error: --planner: unknown planner '" << args.planner << "'\n";
        return 1;
    }
    const vomcts::ScenarioConfig scenario = vomcts::load_scenario_file(args.scenario_file);
    const std::uint64_t seed = args.seed.value_or(scenario.seed);

    vomcts::PlannerConfig pc;
    pc.m = args.m;
    pc.gamma = args.gamma;
    pc.c_p = args.c_p;
    pc.epsilon0 = args.epsilon0;
    pc.delta = args.delta;
    pc.depth_cap = args.depth_cap;
    pc.n_speeds = args.n_speeds;
    pc.n_angles = args.n_angles;
    pc.safety_margin = args.safety_margin;
    pc.rollout_brush = args.rollout_brush;
    if (args.planning_model == "stochastic") {
        pc.planning_model = vomcts::PlanningModel::Stochastic;
    } else if (args.planning_model != "frozen") {
        std::cerr << "error: --planning-model: must be 'frozen' or 'stochastic'\n";
        return 1;
    }
    pc.world = vomcts::WorldParams{scenario.t_s, scenario.r_h, args.step_cap};
    vomcts::DwaConfig dwa;
    dwa.n_speeds = args.n_speeds;
    dwa.n_angles = args.n_angles;
    vomcts::Planner planner(*id, pc, dwa);

    vomcts::EpisodeOptions opts;
    opts.step_cap = args.step_cap;
    opts.keep_diagnostics = !args.no_diagnostics;

    nlohmann::json echo{{"scenario", vomcts::scenario_to_json(scenario)},
                        {"planner", args.planner},
                        {"m", args.m},
                        {"seed", seed},
                        {"gamma", args.gamma},
                        {"c_p", args.c_p},
                        {"epsilon0", args.epsilon0},
                        {"delta", args.delta},
                        {"depth_cap", args.depth_cap},
                        {"n_speeds", args.n_speeds},
                        {"n_angles", args.n_angles},
                        {"safety_margin", args.safety_margin},
                        {"rollout_brush", args.rollout_brush},
                        {"planning_obstacle_model", args.planning_model}};
    const vomcts::EpisodeRecord rec =
        vomcts::run_episode(planner, scenario, seed, opts, std::move(echo));
    std::cout << vomcts::episode_to_json(rec).dump(2) << "\n";
    return 0;
}

int do_sweep(const std::string& config_file, const std::string& out_dir, int jobs,
             bool print_config, bool mask_timing) {
    vomcts::SweepConfig cfg = vomcts::load_sweep_file(config_file);
    if (mask_timing) cfg.record_timing = false;
    if (print_config) {
        std::cout << vomcts::sweep_to_json(cfg).dump(2) << "\n";
        return 0;
    }
    if (out_dir.empty()) {
        std::cerr << "error: --out: output directory required\n";
        return 1;
    }
    const vomcts::SweepResult result = vomcts::run_sweep(cfg, jobs);
    vomcts::write_sweep_outputs(result, out_dir);
    std::cout << "wrote " << out_dir << "/summary.csv (" << result.summary.rows.size()
              << " rows), raw.jsonl (" << result.records.size() << " episodes)\n";
    return 0;
}

int do_replay(const std::string& record_file, const std::string& out_csv, int index) {
    std::ifstream in(record_file);
    if (!in) throw std::invalid_argument("replay: cannot open file '" + record_file + "'");
    std::string line;
    int k = 0;
    std::optional<vomcts::EpisodeRecord> rec;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (k == index) {
            rec = vomcts::episode_from_json(nlohmann::json::parse(line));
            break;
        }
        ++k;
    }
    if (!rec) {
        throw std::invalid_argument("replay: --index " + std::to_string(index) +
                                    " out of range for '" + record_file + "'");
    }
    const double rho = vomcts::recompute_rho(*rec);
    if (std::abs(rho - rec->rho) > 1e-9) {
        std::cerr << "replay: log does not reproduce the recorded return (" << rho
                  << " vs " << rec->rho << ")\n";
        return 2;
    }
    std::ofstream out(out_csv, std::ios::binary);
    if (!out) throw std::invalid_argument("replay: cannot write file '" + out_csv + "'");
    vomcts::write_trajectory_csv(*rec, out);
    std::cout << "replayed episode " << index << ": planner=" << rec->planner
              << " outcome=" << vomcts::cause_name(rec->outcome) << " steps=" << rec->steps
              << " rho=" << rec->rho << " (log verified)\n";
    return 0;
}

int do_oracle_check(long samples, std::uint64_t seed, double angular_res, double time_res) {
    const vomcts::OracleSuiteResult res =
        vomcts::run_oracle_suite(samples, seed, angular_res, time_res);
    std::printf("scenes checked:        %ld\n", res.scenes);
    std::printf("headings compared:     %ld\n", res.headings_checked);
    std::printf("mismatches:            %ld\n", res.mismatches);
    std::printf("soundness probes:      %ld\n", res.soundness_checked);
    std::printf("soundness violations:  %ld\n", res.soundness_violations);
    std::printf("%s\n", res.passed() ? "PASS" : "FAIL");
    return res.passed() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"velocity-obstacle constrained Monte Carlo tree search planner"};
    app.require_subcommand(1);

    RunArgs run_args;
    CLI::App* run = app.add_subcommand("run", "run one episode and print its record as JSON");
    run->add_option("--scenario", run_args.scenario_file, "scenario JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    run->add_option("--planner", run_args.planner,
                    "one of: mcts, mcts_vo_tree, mcts_vo_rollout, mcts_vo2, vo_planner, dwa")
        ->required();
    run->add_option("--m", run_args.m, "simulations per planning step")->check(CLI::PositiveNumber);
    std::uint64_t seed_value = 0;
    CLI::Option* seed_opt = run->add_option("--seed", seed_value, "scenario seed");
    run->add_option("--step-cap", run_args.step_cap, "episode step limit");
    run->add_option("--gamma", run_args.gamma, "discount factor");
    run->add_option("--cp", run_args.c_p, "UCT exploration constant");
    run->add_option("--epsilon0", run_args.epsilon0, "rollout uniform threshold");
    run->add_option("--delta", run_args.delta, "rollout goal-cone half-width (rad)");
    run->add_option("--depth-cap", run_args.depth_cap, "simulation depth budget");
    run->add_option("--n-speeds", run_args.n_speeds, "speed discretization");
    run->add_option("--n-angles", run_args.n_angles, "heading discretization");
    run->add_option("--safety-margin", run_args.safety_margin, "additive margin on r2");
    run->add_option("--rollout-brush", run_args.rollout_brush,
                    "rollout obstacle-crossing cost");
    run->add_option("--planning-model", run_args.planning_model, "frozen | stochastic");
    run->add_flag("--no-diagnostics", run_args.no_diagnostics, "omit per-step planner diagnostics");

    std::string sweep_config, sweep_out;
    int sweep_jobs = 1;
    bool sweep_print = false, sweep_mask_timing = false;
    CLI::App* sweep = app.add_subcommand("sweep", "run a full planner/m sweep");
    sweep->add_option("--config", sweep_config, "sweep config JSON file")
        ->required()
        ->check(CLI::ExistingFile);
    sweep->add_option("--out", sweep_out, "output directory");
    sweep->add_option("--jobs", sweep_jobs, "parallel episode workers")
        ->check(CLI::PositiveNumber);
    sweep->add_flag("--print-config", sweep_print, "print the fully resolved config and exit");
    sweep->add_flag("--mask-timing", sweep_mask_timing,
                    "zero planning-time fields for byte-reproducible output");

    std::string replay_record, replay_out;
    int replay_index = 0;
    CLI::App* replay = app.add_subcommand("replay", "re-emit a trajectory CSV from raw records");
    replay->add_option("--record", replay_record, "raw JSONL record file")
        ->required()
        ->check(CLI::ExistingFile);
    replay->add_option("--out", replay_out, "output CSV path")->required();
    replay->add_option("--index", replay_index, "record index within the file");

    long oracle_samples = 1000;
    std::uint64_t oracle_seed = 12345;
    double oracle_angular_res = 0.004;
    double oracle_time_res = 1.0 / 64.0;
    CLI::App* oracle = app.add_subcommand("oracle-check",
                                          "kernel vs brute-force equivalence and soundness");
    oracle->add_option("--samples", oracle_samples, "number of random scenes")
        ->check(CLI::PositiveNumber);
    oracle->add_option("--seed", oracle_seed, "scene stream seed");
    oracle->add_option("--angular-resolution", oracle_angular_res, "heading sample spacing (rad)");
    oracle->add_option("--time-resolution", oracle_time_res, "ray marching step (s)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (run->parsed()) {
            if (seed_opt->count() > 0) run_args.seed = seed_value;
            return do_run(run_args);
        }
        if (sweep->parsed()) {
            return do_sweep(sweep_config, sweep_out, sweep_jobs, sweep_print, sweep_mask_timing);
        }
        if (replay->parsed()) return do_replay(replay_record, replay_out, replay_index);
        if (oracle->parsed()) {
            return do_oracle_check(oracle_samples, oracle_seed, oracle_angular_res,
                                   oracle_time_res);
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
