#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

#include "hsmdp/bitmask.hpp"
#include "hsmdp/budget.hpp"
#include "hsmdp/config.hpp"
#include "hsmdp/types.hpp"

namespace hsmdp {

/// One task of the non-hierarchical model.
struct FlatTask {
    std::size_t goal = 0;        ///< index into ToDoList::goals
    std::size_t task = 0;        ///< index into Goal::tasks
    Minutes deadline = kNoDeadline;
    struct Outcome {
        Minutes tau;
        double p;
        double cost;
        double disc;
    };
    std::vector<Outcome> outcomes;
    double expected_minutes = 0.0;
    double expected_cost = 0.0;
};

/// All tasks of all open goals over a single {0,1}^n completion vector.
struct FlatModel {
    Config cfg;
    Minutes t0 = 0;
    std::vector<FlatTask> tasks;
    std::vector<double> goal_value;           ///< per model goal
    std::vector<std::uint32_t> goal_members;  ///< task bits belonging to each model goal
    std::vector<std::size_t> goal_source;     ///< model goal -> ToDoList goal index
    std::vector<int> task_goal;               ///< task -> model goal
    std::uint32_t initial_mask = 0;

    std::size_t size() const { return tasks.size(); }
    std::uint64_t mask_state_count() const { return std::uint64_t{1} << tasks.size(); }
    std::uint32_t full_mask() const {
        return tasks.size() >= 32 ? ~0u : ((std::uint32_t{1} << tasks.size()) - 1);
    }
};

inline constexpr std::size_t kDefaultFlatCap = 20;

/// Builds the flat model. Throws DomainError above `cap` tasks.
FlatModel build_flat(const ToDoList& list, const Config& cfg, Minutes t0 = 0,
                     std::size_t cap = kDefaultFlatCap);

/// Time-stamped flat state. `beta` holds the accumulated penalty of each model goal and
/// is empty when penalties are disabled.
struct FlatState {
    std::uint32_t mask = 0;
    Minutes t = 0;
    std::vector<double> beta;

    bool operator==(const FlatState&) const = default;
};

struct FlatStateHash {
    std::size_t operator()(const FlatState& s) const noexcept;
};

/// Values, Q-values and greedy policy over every state reachable from the start.
class FlatSolution {
public:
    struct Transition {
        int action;
        double p;
        double reward;   ///< task cost plus discounted goal reward on completion
        double disc;
        std::uint32_t next;
    };

    double start_value() const { return values_.at(0); }
    std::optional<double> value(const FlatState& s) const;
    /// Task index, kSlackAction or kTerminalAction.
    std::optional<int> policy(const FlatState& s) const;
    std::optional<double> q(const FlatState& s, int action) const;
    const FlatState& start() const { return states_.at(0); }

    /// Greedy rollout from the start following the most likely duration outcome.
    std::vector<std::size_t> rollout() const;

    std::size_t state_count() const { return states_.size(); }
    int sweeps() const { return sweeps_; }

private:
    static void build_graph(const FlatModel& model, FlatSolution& sol, SolveBudget* budget);
    friend FlatSolution backward_induction(const FlatModel&, SolveBudget*);
    friend FlatSolution value_iteration(const FlatModel&, double, int, SolveBudget*);

    std::vector<FlatState> states_;
    std::unordered_map<FlatState, std::uint32_t, FlatStateHash> index_;
    std::vector<std::vector<Transition>> transitions_;   ///< per state, grouped by action
    std::vector<double> values_;
    std::vector<int> policy_;
    std::vector<std::vector<std::pair<int, double>>> q_;
    double slack_q_ = 0.0;
    int sweeps_ = 0;
};

/// Exact solve by sweeping completion layers in decreasing popcount.
FlatSolution backward_induction(const FlatModel& model, SolveBudget* budget = nullptr);

/// Synchronous value iteration with an absorbing slack-off state. Stops once the sup-norm
/// residual guarantees |V - V*| < eps. Throws ConvergenceError after `max_sweeps`.
FlatSolution value_iteration(const FlatModel& model, double eps, int max_sweeps = 100000,
                             SolveBudget* budget = nullptr);

} // namespace hsmdp
