#include "hsmdp/config.hpp"
#include "hsmdp/errors.hpp"
#include "hsmdp/types.hpp"

namespace hsmdp {

bool Goal::all_tasks_completed() const {
    for (const auto& task : tasks)
        if (!task.completed) return false;
    return true;
}

int Goal::total_estimate() const {
    int total = 0;
    for (const auto& task : tasks) total += task.est_minutes;
    return total;
}

std::size_t ToDoList::task_count() const {
    std::size_t n = 0;
    for (const auto& g : goals) n += g.tasks.size();
    return n;
}

std::size_t ToDoList::open_task_count() const {
    std::size_t n = 0;
    for (const auto& g : goals) {
        if (g.completed) continue;
        for (const auto& t : g.tasks)
            if (!t.completed) ++n;
    }
    return n;
}

void Config::validate() const {
    if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
    if (gamma >= 1.0 && slack_reward > 0.0)
        throw ConfigError("gamma must be below 1 when slack_reward is positive");
    if (!(loss_rate > 0.0)) throw ConfigError("loss_rate must be positive");
    if (!(penalty_rate >= 0.0)) throw ConfigError("penalty_rate must be nonnegative");
    if (!(c_pf > 0.0)) throw ConfigError("c_pf must be positive");
    if (!(slack_reward >= 0.0)) throw ConfigError("slack_reward must be nonnegative");
    if (n_durations < 1) throw ConfigError("n_durations must be at least 1");
    if (!(scale_m > 0.0)) throw ConfigError("scale_m must be positive");
    if (round_decimals < 0 || round_decimals > 12)
        throw ConfigError("round_decimals must lie in [0, 12]");
    if (value_range.lo > value_range.hi || avg_value_range.lo > avg_value_range.hi)
        throw ConfigError("validation ranges must satisfy lo <= hi");
}

} // namespace hsmdp
