#pragma once

#include <chrono>
#include <optional>
#include <string>
#include <string_view>

#include "vomcts/baselines.hpp"
#include "vomcts/mcts.hpp"

namespace vomcts {

enum class PlannerId { Mcts, MctsVoTree, MctsVoRollout, MctsVo2, VoPlanner, Dwa };

inline constexpr const char* kPlannerNames[] = {"mcts",  "mcts_vo_tree", "mcts_vo_rollout",
                                                "mcts_vo2", "vo_planner",   "dwa"};

inline const char* planner_name(PlannerId id) {
    return kPlannerNames[static_cast<int>(id)];
}

inline std::optional<PlannerId> parse_planner_id(std::string_view name) {
    for (int i = 0; i < 6; ++i) {
        if (name == kPlannerNames[i]) return static_cast<PlannerId>(i);
    }
    return std::nullopt;
}

inline bool planner_is_mcts(PlannerId id) {
    return id == PlannerId::Mcts || id == PlannerId::MctsVoTree ||
           id == PlannerId::MctsVoRollout || id == PlannerId::MctsVo2;
}

inline Variant variant_of(PlannerId id) {
    switch (id) {
        case PlannerId::MctsVoTree: return Variant::VoTree;
        case PlannerId::MctsVoRollout: return Variant::VoRollout;
        case PlannerId::MctsVo2: return Variant::VoBoth;
        default: return Variant::Plain;
    }
}

struct Decision {
    VelocityAction action;
    PlanDiagnostics diagnostics;
};

/// Uniform front over the tree-search variants and the reactive baselines.
/// Stateless between calls; all randomness flows through the caller's stream.
class Planner {
public:
    Planner(PlannerId id, PlannerConfig cfg, DwaConfig dwa = {})
        : id_(id), cfg_(cfg), dwa_(dwa) {
        cfg_.variant = variant_of(id);
    }

    PlannerId id() const { return id_; }
    const PlannerConfig& config() const { return cfg_; }
    const DwaConfig& dwa_config() const { return dwa_; }

    Decision decide(const WorldState& s, Rng& rng) const {
        if (planner_is_mcts(id_)) {
            PlanResult res = plan(s, cfg_, rng);
            return {res.action, std::move(res.diagnostics)};
        }
        Decision d;
        const auto t0 = std::chrono::steady_clock::now();
        if (id_ == PlannerId::VoPlanner) {
            d.action = vo_planner_decide(s, cfg_.world, cfg_.epsilon0, cfg_.delta,
                                         cfg_.safety_margin, rng);
        } else {
            d.action = dwa_decide(s, dwa_, cfg_.world);
        }
        d.diagnostics.t_plan =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        d.diagnostics.m = 0;
        d.diagnostics.c_p = cfg_.c_p;
        d.diagnostics.chosen = d.action;
        return d;
    }

private:
    PlannerId id_;
    PlannerConfig cfg_;
    DwaConfig dwa_;
};

}  // namespace vomcts
