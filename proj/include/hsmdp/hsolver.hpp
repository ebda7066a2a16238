#pragma once

#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <unordered_map>
#include <vector>

#include "hsmdp/budget.hpp"
#include "hsmdp/config.hpp"
#include "hsmdp/distribution.hpp"
#include "hsmdp/qtable.hpp"
#include "hsmdp/types.hpp"

namespace hsmdp {

/// Open tasks of one goal in nondecreasing deadline order (ties keep list order).
struct TaskQueue {
    std::size_t goal = 0;
    std::vector<std::size_t> order;       ///< indices into Goal::tasks
    std::vector<Minutes> deadlines;       ///< effective deadline of order[i]
    std::size_t cursor = 0;
};

TaskQueue build_task_queue(const Goal& goal, std::size_t goal_index);

/// Observer hooks over the task-level recursion, used by tests and diagnostics.
struct TaskTrace {
    std::function<void(std::size_t goal, double probability_sum)> on_expand;
    std::function<void(std::size_t goal, Minutes t, Minutes t_next, double beta, double beta_next)>
        on_transition;
    std::function<void(std::size_t goal, Minutes t, double beta, double reward)> on_terminal;
};

struct SolverOptions {
    /// Memoize goal-level values on the completion mask. When false, every goal ordering
    /// is expanded separately.
    bool memoize_goal_level = true;
    /// Keep every task-level state in Solution::task_tables. When false only the goal's
    /// entry state is kept, which is all the incentives need and keeps memory flat.
    bool record_task_states = true;
    SolveBudget* budget = nullptr;
    const TaskTrace* trace = nullptr;
};

struct TaskValue {
    std::size_t goal = 0;
    std::size_t task = 0;
    double task_q = 0.0;       ///< task-level Q at the goal's initial state
    double combined_q = 0.0;   ///< plus the discounted value of the best next goal
    double expected_cost = 0.0;
    double expected_minutes = 0.0;
};

struct Solution {
    Minutes t0 = 0;
    Bitmask goal_mask;                   ///< goal-level state at t0
    std::vector<QTable> task_tables;     ///< per goal, solved at t0 (empty for done goals)
    QTable goal_table{Level::Goal};
    std::vector<std::size_t> goal_order; ///< goal-level policy rolled out from t0
    std::vector<TaskValue> task_values;  ///< every open task
    double value = 0.0;                  ///< V*(s_t0)
    double slack_value = 0.0;

    const TaskValue* find(std::size_t goal, std::size_t task) const;
    /// Task with the largest combined value, ties to the longer task then list order.
    std::optional<TaskValue> best_task() const;
};

/// Two-level SMDP solver over goals and tasks.
class HierarchicalSolver {
public:
    HierarchicalSolver(const ToDoList& list, const Config& cfg, SolverOptions options = {});

    Solution solve(Minutes t0 = 0);

    /// Goal-level table from `start`, whose mask marks completed goals.
    QTable solve_next_goals(const BitmaskState& start);

    /// Task-level table for goal g entered at t_start. Every open task is tried as the
    /// first action when t_start == t0; otherwise only the deadline-ordered path.
    QTable solve_goal(std::size_t g, Minutes t_start, Minutes t0 = 0);

    /// Value of the deadline-ordered continuation from queue position `pos`,
    /// optionally executing `action` first.
    double solve_next_tasks(std::size_t g, Minutes t, double beta, std::size_t pos,
                            std::optional<std::size_t> action);

    const TaskQueue& queue(std::size_t g) const { return goals_[g].queue; }
    const DurationDistribution& duration(std::size_t g, std::size_t task) const {
        return goals_[g].dists[task];
    }
    Minutes goal_duration(std::size_t g) const { return goals_[g].tau; }

private:
    struct Outcome {
        Minutes tau;
        double p;
        double cost;
        double disc;
    };
    struct GoalData {
        std::vector<DurationDistribution> dists;
        std::vector<std::vector<Outcome>> outcomes;
        std::vector<Minutes> deadline;   ///< effective deadline per task
        Bitmask initial;                 ///< completed tasks at input
        TaskQueue queue;
        Minutes tau = 0;                 ///< deterministic goal-level duration
        double disc = 1.0;
        double value = 0.0;
        bool open = false;
        bool branching = false;
    };
    struct NodeKey {
        Bitmask mask;
        Minutes t;
        double beta;
        bool operator==(const NodeKey&) const = default;
    };
    struct NodeKeyHash {
        std::size_t operator()(const NodeKey& k) const noexcept;
    };

    double expand(std::size_t g, std::size_t pos, const Bitmask& mask, Minutes t, double beta,
                  std::optional<std::size_t> action, QTable* table);
    double goal_entry_value(std::size_t g, Minutes t);
    double next_goals(const Bitmask& mask, Minutes t, QTable& table);
    void tick();

    const ToDoList& list_;
    Config cfg_;
    SolverOptions options_;
    std::vector<GoalData> goals_;
    double slack_ = 0.0;
    Minutes t0_ = 0;
    std::unordered_map<NodeKey, double, NodeKeyHash> memo_;
    std::unordered_map<Bitmask, double> goal_memo_;
    std::map<std::pair<std::size_t, Minutes>, double> entry_cache_;
    std::vector<QTable> t0_tables_;
};

Solution solve_todo_list(const ToDoList& list, Minutes t0, const Config& cfg,
                         SolverOptions options = {});

/// Rough count of solver nodes: sum_g n_g^b * n_g + 2^|G| * |G|.
double complexity_guard(const ToDoList& list, const Config& cfg);

/// Relative-tolerance comparison used for argmax tie detection.
bool nearly_equal(double a, double b, double rel = 1e-9);

} // namespace hsmdp
