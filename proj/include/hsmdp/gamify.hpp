#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "hsmdp/bitmask.hpp"
#include "hsmdp/config.hpp"
#include "hsmdp/hsolver.hpp"
#include "hsmdp/types.hpp"

namespace hsmdp {

struct IncentivizedTask {
    std::size_t goal = 0;
    std::size_t task = 0;
    std::string id;
    std::string title;
    double f_star = 0.0;
    double f_prime = 0.0;
    double expected_reward = 0.0;  ///< expected immediate task cost (nonpositive)
    double q = 0.0;                ///< combined Q at t0
    double expected_minutes = 0.0;
    double raw_points = 0.0;       ///< before rounding
    double points = 0.0;           ///< rounded to cfg.round_decimals
    Minutes display_minutes = 0;
    bool forced = false;
};

struct Incentives {
    std::vector<IncentivizedTask> tasks;   ///< every open task, ordered by (goal, task)
    double scale_m = 1.0;
    double offset_b = 0.0;
    double goal_value_sum = 0.0;           ///< sum of R(g) over open goals
    double v0 = 0.0;                       ///< V*(s0)
    double slack_f_star = 0.0;
    double slack_points = 0.0;             ///< unrounded, not part of the budget

    const IncentivizedTask* find(std::size_t goal, std::size_t task) const;
    /// Highest raw points; ties to the longer task, then list order.
    const IncentivizedTask* top() const;
};

/// f*(a) = E[gamma^tau V*(s')] - V*(s0) for every open task, filled into `Incentives`
/// along with the solution Q-values. Scale and offset are left at identity.
Incentives pseudo_rewards(const Solution& sol, const ToDoList& list, const Config& cfg);

/// points = m f* + b + E[r], with b chosen so the unrounded points of all open tasks sum
/// to the total value of the open goals. Rounds to cfg.round_decimals once, at the end.
void transform(Incentives& inc, const Config& cfg);

/// Solve, shape and round in one call.
Incentives incentivize(const ToDoList& list, Minutes t0, const Config& cfg,
                       SolverOptions options = {});

double round_points(double x, int decimals);

struct DailySchedule {
    std::vector<IncentivizedTask> tasks;   ///< by points, highest first
    Minutes total_minutes = 0;
    Minutes capacity = 0;
    bool has_forced = false;
    bool overflow = false;                 ///< forced tasks alone exceed the capacity
};

/// Forced tasks first, then the remaining eligible tasks in points order while they fit.
DailySchedule schedule_today(const Incentives& inc, const ToDoList& list, Minutes today_minutes,
                             const Config& cfg);

/// "takes about 4 hours and 11 minutes"
std::string format_duration(Minutes minutes);

enum class RewardView { Shaped, Raw };

struct Trajectory {
    struct Step {
        std::size_t goal;
        std::size_t task;
        Minutes start;
    };
    std::vector<Step> steps;
    bool slacked_off = false;
};

/// Greedy agent that maximizes the immediate reward of each choice. Shaped: re-solves and
/// re-shapes after every completion and follows the points. Raw: compares expected task
/// costs (plus the goal reward when it completes the goal) against the slack reward.
/// Durations follow the most likely outcome.
Trajectory simulate_myopic(ToDoList list, const Config& cfg, RewardView view, Minutes t0 = 0,
                           SolverOptions options = {});

/// (V*(s_b) - V*(s_a)) / (t_b - t_a).
double productivity(const BitmaskState& a, const BitmaskState& b,
                    const std::function<double(const BitmaskState&)>& value);

} // namespace hsmdp
