#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>
#include <tuple>
#include <vector>

#include "vomcts/rng.hpp"
#include "vomcts/vo_kernel.hpp"
#include "vomcts/world.hpp"

namespace vomcts {

/// Where velocity-obstacle pruning is applied inside the search.
enum class Variant { Plain, VoTree, VoRollout, VoBoth };

/// Obstacle model assumed during planner-internal simulation. Frozen keeps
/// obstacles at their observed positions; safety still comes from the
/// worst-case inflation in the kernel.
enum class PlanningModel { Frozen, Stochastic };

struct PlannerConfig {
    int m = 100;              // simulations per decision step
    double gamma = 0.7;       // discount
    double c_p = 50.0;        // exploration constant (r_h / 2 by default)
    double epsilon0 = 0.2;    // rollout uniform-selection threshold
    double delta = 1.0;       // rollout goal-cone half-width, rad
    int depth_cap = 100;      // tree depth + rollout steps share this budget
    Variant variant = Variant::Plain;
    int n_speeds = 5;
    int n_angles = 12;
    PlanningModel planning_model = PlanningModel::Frozen;
    double safety_margin = 0.0;   // added to every extended radius r2
    double rollout_brush = 1.0;   // non-terminal cost of crossing an obstacle in rollout walks
    WorldParams world;
};

struct ActionStat {
    int n = 0;
    double q = 0.0;
};

struct SearchNode {
    explicit SearchNode(WorldState s) : state(std::move(s)) {}

    WorldState state;
    int visit_count = 0;
    bool initialized = false;
    std::vector<VelocityAction> actions;  // admissible here, in action-index order
    std::vector<int> action_index;        // index into the full discretized set
    std::vector<ActionStat> stats;
    std::vector<std::unique_ptr<SearchNode>> children;
    std::vector<double> edge_reward;  // cached transition results (deterministic model)
    std::vector<Cause> edge_cause;
};

inline bool uses_vo_in_tree(Variant v) { return v == Variant::VoTree || v == Variant::VoBoth; }
inline bool uses_vo_in_rollout(Variant v) {
    return v == Variant::VoRollout || v == Variant::VoBoth;
}

/// Computes the node's admissible action list: the full discretized set, or
/// its velocity-obstacle restriction for the in-tree pruning variants.
///
/// The list is ordered by goal-bearing alignment (fastest first within equal
/// alignment). Unvisited-first selection walks this order, so at small
/// simulation budgets the explored subset consists of the safest goal-pointing
/// actions: with gamma-discounted distance shaping the per-action value gaps
/// sit far below single-rollout noise, and the exploration order, not the Q
/// estimates, is what steers until visit counts accumulate.
inline void ensure_initialized(SearchNode& node, const PlannerConfig& cfg) {
    if (node.initialized) return;
    const auto full = action_space(node.state.robot, cfg.world.t_s, cfg.n_speeds, cfg.n_angles);
    if (uses_vo_in_tree(cfg.variant)) {
        const SafeVelocitySet safe =
            safe_velocities(node.state, cfg.world.t_s, cfg.safety_margin);
        if (!safe.headings.empty()) {
            for (std::size_t i = 0; i < full.size(); ++i) {
                if (action_admissible(full[i], safe)) {
                    node.actions.push_back(full[i]);
                    node.action_index.push_back(static_cast<int>(i));
                }
            }
        }
        if (node.actions.empty()) {
            // Stationary fallback: only the in-place rotations remain.
            for (std::size_t i = 0; i < full.size(); ++i) {
                if (full[i].speed == 0.0) {
                    node.actions.push_back(full[i]);
                    node.action_index.push_back(static_cast<int>(i));
                }
            }
        }
    } else {
        node.actions = full;
        node.action_index.resize(full.size());
        for (std::size_t i = 0; i < full.size(); ++i) node.action_index[i] = static_cast<int>(i);
    }

    const double goal_bearing = bearing(node.state.robot.position, node.state.goal);
    std::vector<std::size_t> order(node.actions.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const double da = std::abs(angle_diff(node.actions[a].heading, goal_bearing));
        const double db = std::abs(angle_diff(node.actions[b].heading, goal_bearing));
        if (da != db) return da < db;
        if (node.actions[a].speed != node.actions[b].speed) {
            return node.actions[a].speed > node.actions[b].speed;
        }
        return node.action_index[a] < node.action_index[b];
    });
    std::vector<VelocityAction> sorted_actions;
    std::vector<int> sorted_index;
    sorted_actions.reserve(order.size());
    sorted_index.reserve(order.size());
    for (std::size_t i : order) {
        sorted_actions.push_back(node.actions[i]);
        sorted_index.push_back(node.action_index[i]);
    }
    node.actions = std::move(sorted_actions);
    node.action_index = std::move(sorted_index);

    node.stats.assign(node.actions.size(), ActionStat{});
    node.children.resize(node.actions.size());
    node.edge_reward.assign(node.actions.size(), 0.0);
    node.edge_cause.assign(node.actions.size(), Cause::None);
    node.initialized = true;
}

/// UCT rule: unvisited actions carry an infinite bound and are taken first in
/// action-index order; otherwise argmax of Q + 2*c_p*sqrt(ln N(s) / N(s,a)),
/// ties to the lowest index.
inline int uct_select(const SearchNode& node, double c_p) {
    if (node.actions.empty()) throw std::logic_error("uct_select: no admissible actions");
    for (std::size_t i = 0; i < node.stats.size(); ++i) {
        if (node.stats[i].n == 0) return static_cast<int>(i);
    }
    const double log_n = std::log(static_cast<double>(node.visit_count));
    int best = 0;
    double best_score = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < node.stats.size(); ++i) {
        const double score =
            node.stats[i].q + 2.0 * c_p * std::sqrt(log_n / node.stats[i].n);
        if (score > best_score) {
            best_score = score;
            best = static_cast<int>(i);
        }
    }
    return best;
}

inline ObstacleModel planning_obstacle_model(const PlannerConfig& cfg, Rng& rng) {
    if (cfg.planning_model == PlanningModel::Stochastic) return StochasticModel{&rng};
    return FrozenModel{};
}

struct ExpandResult {
    int action = -1;       // local index into node.actions
    double reward = 0.0;
    Cause cause = Cause::None;
    SearchNode* child = nullptr;
    bool was_new = false;
};

/// One in-tree step: select with UCT, sample the transition under the
/// planning model, and attach the child node if absent. With the frozen
/// (deterministic) model, revisited edges reuse the cached transition.
inline ExpandResult expand(SearchNode& node, const PlannerConfig& cfg, Rng& rng) {
    ensure_initialized(node, cfg);
    ExpandResult res;
    res.action = uct_select(node, cfg.c_p);
    res.was_new = node.children[static_cast<std::size_t>(res.action)] == nullptr;
    auto& slot = node.children[static_cast<std::size_t>(res.action)];
    if (res.was_new) {
        StepOutcome out = world_step(node.state, node.actions[res.action],
                                     planning_obstacle_model(cfg, rng), cfg.world);
        slot = std::make_unique<SearchNode>(std::move(out.next_state));
        node.edge_reward[res.action] = out.reward;
        node.edge_cause[res.action] = out.cause;
        res.reward = out.reward;
        res.cause = out.cause;
    } else if (cfg.planning_model == PlanningModel::Stochastic) {
        StepOutcome out = world_step(node.state, node.actions[res.action],
                                     planning_obstacle_model(cfg, rng), cfg.world);
        res.reward = out.reward;
        res.cause = out.cause;
    } else {
        res.reward = node.edge_reward[res.action];
        res.cause = node.edge_cause[res.action];
    }
    res.child = slot.get();
    return res;
}

/// Draws one velocity from the rollout policy: with probability epsilon0 a
/// uniform draw over the admissible set, otherwise a heading uniform in the
/// goal cone intersected with the safe headings (falling back to the uniform
/// branch when that intersection is empty). The goal-directed branch commands
/// the full admissible speed, which is the worst case the collision cones
/// were built for; uniform speeds would average half pace and cannot traverse
/// the workspace inside the step cap. With no safe headings the command is an
/// in-place rotation.
inline VelocityAction sample_policy_action(const WorldState& s, const AngularIntervalSet& safe,
                                           double v_hi, double eps0, double delta, double t_s,
                                           Rng& rng) {
    const auto uniform_branch = [&]() -> VelocityAction {
        if (safe.empty()) {
            const AngularIntervalSet window = kinematic_arc(robot_disc(s.robot), t_s);
            return {0.0, window.sample_at(rng.uniform01())};
        }
        const double alpha = safe.sample_at(rng.uniform01());
        return {rng.uniform(0.0, v_hi), alpha};
    };

    const double eps = rng.uniform01();
    if (eps <= eps0) return uniform_branch();

    const double alpha_goal = bearing(s.robot.position, s.goal);
    const AngularIntervalSet cone =
        AngularIntervalSet::interval(alpha_goal - delta, alpha_goal + delta);
    const AngularIntervalSet inter = safe.intersect(cone);
    if (inter.empty()) return uniform_branch();
    const double alpha = inter.sample_at(rng.uniform01());
    return {v_hi, alpha};
}

/// Goal-biased epsilon-greedy rollout from `state`, discounted from its first
/// step. The admissible set is recomputed with the kernel every step for the
/// rollout-pruning variants, and is the full kinematic window otherwise.
///
/// The walk steps in RolloutWalk reward mode: goal and bounds adjudication
/// stay terminal, while obstacle coincidence is transparent (see RewardMode).
inline double rollout(const WorldState& state, const PlannerConfig& cfg, Rng& rng,
                      int max_steps) {
    if (max_steps <= 0 || is_terminal_state(state, cfg.world)) return 0.0;
    WorldState cur = state;
    double total = 0.0;
    double disc = 1.0;
    for (int k = 0; k < max_steps; ++k) {
        AngularIntervalSet safe_headings;
        double v_hi = cur.robot.v_max;
        if (uses_vo_in_rollout(cfg.variant)) {
            SafeVelocitySet safe = safe_velocities(cur, cfg.world.t_s, cfg.safety_margin);
            safe_headings = std::move(safe.headings);
            v_hi = safe.v_hi;
        } else {
            safe_headings = kinematic_arc(robot_disc(cur.robot), cfg.world.t_s);
        }
        const VelocityAction a = sample_policy_action(cur, safe_headings, v_hi, cfg.epsilon0,
                                                      cfg.delta, cfg.world.t_s, rng);
        auto [r, cause] = detail::advance_in_place(cur, a, planning_obstacle_model(cfg, rng),
                                                   cfg.world, RewardMode::RolloutWalk,
                                                   cfg.rollout_brush);
        total += disc * r;
        disc *= cfg.gamma;
        if (cause != Cause::None) break;
    }
    return total;
}

/// Backs up one simulation: G accumulates leaf-to-root as r + gamma * G
/// starting from the rollout tail, updating running means and visit counts.
inline void backup(std::vector<std::tuple<SearchNode*, int, double>>& path, double tail_return,
                   double gamma) {
    double g = tail_return;
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
        auto& [node, action, r] = *it;
        g = r + gamma * g;
        ActionStat& st = node->stats[static_cast<std::size_t>(action)];
        st.n += 1;
        st.q += (g - st.q) / st.n;
        node->visit_count += 1;
    }
}

struct RootStat {
    VelocityAction action;
    int action_index = 0;
    double q = 0.0;
    int n = 0;
};

struct PlanDiagnostics {
    double t_plan = 0.0;  // seconds
    int m = 0;
    double c_p = 0.0;
    std::vector<RootStat> root_stats;
    VelocityAction chosen;
};

struct PlanResult {
    VelocityAction action;
    PlanDiagnostics diagnostics;
};

namespace detail {

/// One simulation: descend with UCT, roll out from the newly attached leaf,
/// back the return up. Rollout streams are pegged to (depth, visit ordinal of
/// the leaf), so sibling leaves replay the same policy draws: rollout-path
/// luck cancels out of Q differences and the systematic position signal
/// survives single visits.
inline void simulate_once(SearchNode& root, const PlannerConfig& cfg, Rng& rng,
                          std::uint64_t plan_seed) {
    std::vector<std::tuple<SearchNode*, int, double>> path;
    SearchNode* node = &root;
    double tail = 0.0;
    int depth = 0;
    while (depth < cfg.depth_cap) {
        ExpandResult step = expand(*node, cfg, rng);
        path.emplace_back(node, step.action, step.reward);
        if (step.cause != Cause::None) break;
        const int leaf_visits = node->stats[static_cast<std::size_t>(step.action)].n;
        if (step.was_new) {
            Rng rollout_rng(derive_seed({plan_seed, static_cast<std::uint64_t>(depth + 1),
                                         static_cast<std::uint64_t>(leaf_visits)}));
            tail = rollout(step.child->state, cfg, rollout_rng, cfg.depth_cap - (depth + 1));
            break;
        }
        node = step.child;
        depth += 1;
    }
    backup(path, tail, cfg.gamma);
}

}  // namespace detail

/// Runs exactly cfg.m simulations from the root and returns the visited root
/// action with the highest mean return, ties to the lowest action index.
inline PlanResult plan(const WorldState& root_state, const PlannerConfig& cfg, Rng& rng) {
    if (cfg.m < 1) throw std::invalid_argument("plan: m must be >= 1");
    if (is_terminal_state(root_state, cfg.world)) {
        throw std::logic_error("plan: root state is terminal");
    }
    const auto t0 = std::chrono::steady_clock::now();
    SearchNode root(root_state);
    ensure_initialized(root, cfg);
    const std::uint64_t plan_seed = rng.next_u64();
    for (int sim = 0; sim < cfg.m; ++sim) detail::simulate_once(root, cfg, rng, plan_seed);

    int best = -1;
    for (std::size_t i = 0; i < root.stats.size(); ++i) {
        if (root.stats[i].n == 0) continue;
        if (best < 0 || root.stats[i].q > root.stats[static_cast<std::size_t>(best)].q) {
            best = static_cast<int>(i);
        }
    }
    if (best < 0) throw std::logic_error("plan: no root action was visited");

    PlanResult res;
    res.action = root.actions[static_cast<std::size_t>(best)];
    res.diagnostics.m = cfg.m;
    res.diagnostics.c_p = cfg.c_p;
    res.diagnostics.chosen = res.action;
    res.diagnostics.root_stats.reserve(root.actions.size());
    for (std::size_t i = 0; i < root.actions.size(); ++i) {
        res.diagnostics.root_stats.push_back(
            RootStat{root.actions[i], root.action_index[i], root.stats[i].q, root.stats[i].n});
    }
    res.diagnostics.t_plan =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
}

}  // namespace vomcts
