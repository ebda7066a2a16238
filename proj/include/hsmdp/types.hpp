#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hsmdp {

using Minutes = std::int64_t;

inline constexpr Minutes kNoDeadline = std::numeric_limits<Minutes>::max() / 4;

struct Task {
    std::string id;
    std::string title;
    int est_minutes = 1;
    std::optional<Minutes> deadline_minutes;
    std::set<std::string> tags;
    std::string goal_id;
    bool completed = false;
    bool forced_today = false;    ///< requested for today by a tag, do-date or intention
    bool eligible_today = true;   ///< do-day/do-date constraints allow today
    std::string last_modified;
};

struct Goal {
    std::string id;
    std::string title;
    double value = 0.0;
    std::optional<Minutes> deadline_minutes;   ///< absent means never penalized
    std::optional<double> loss_rate;           ///< overrides Config::loss_rate
    std::vector<Task> tasks;
    bool completed = false;

    Minutes effective_deadline() const { return deadline_minutes.value_or(kNoDeadline); }
    bool all_tasks_completed() const;
    int total_estimate() const;
};

struct ToDoList {
    std::vector<Goal> goals;

    std::size_t task_count() const;
    std::size_t open_task_count() const;
};

} // namespace hsmdp
