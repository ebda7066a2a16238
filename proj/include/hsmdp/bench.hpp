#pragma once

#include <chrono>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hsmdp/config.hpp"
#include "hsmdp/types.hpp"

namespace hsmdp::bench {

inline constexpr int kMeanTaskMinutes = 15;

struct GridPoint {
    int daily_hours = 8;
    int goals = 1;
    int tasks_per_goal = 10;
    int n_durations = 1;

    friend bool operator==(const GridPoint&, const GridPoint&) = default;
};

/// Tasks of average length that fit into one working day: 8 h gives 32.
int daily_task_slots(int daily_hours);

/// Estimates are uniform on [5, 25] minutes. Goal values are 1 to 5 per estimated minute.
/// Goal deadlines fall uniformly between one working day and twice the working days the
/// whole list needs; a quarter of the tasks carry their own deadline inside that window.
ToDoList generate_instance(const GridPoint& p, std::uint64_t seed);

/// Same generator, with `tasks` spread round-robin over ceil(tasks / 8) goals.
ToDoList generate_flat_instance(int tasks, std::uint64_t seed);

struct GridRow {
    GridPoint point;
    int repeat = 0;
    std::uint64_t seed = 0;
    double runtime_s = 0.0;
    bool timed_out = false;
};

/// Solves, shapes and schedules every (point, repeat) under the budget. Timed-out rows
/// report at least the budget as their runtime.
std::vector<GridRow> run_grid(const std::vector<GridPoint>& grid, int repeats,
                              std::chrono::duration<double> budget, std::uint64_t seed = 1);

struct PointSummary {
    GridPoint point;
    int runs = 0;
    int timeouts = 0;
    double reliability = 1.0;   ///< 1 - timeouts / runs
    double median_runtime_s = 0.0;
};

std::vector<PointSummary> summarize(const std::vector<GridRow>& rows);

/// The paper's grid: hours {8,12,16}, goals 1..10, tasks per goal {10,25,50,...,250}, b {1,2}.
std::vector<GridPoint> default_grid();

void write_grid_csv(std::ostream& out, const std::vector<GridRow>& rows);
std::vector<GridRow> read_grid_csv(std::istream& in);

struct CompareRow {
    std::string solver;   ///< HIER, BI or VI
    int tasks = 0;
    int repeat = 0;
    double runtime_s = 0.0;
    double value = 0.0;   ///< V*(s0); NaN when timed out
    bool timed_out = false;
};

/// Penalty-free, single-duration setting in which all three solvers share V*(s0).
Config compare_config();

struct CompareOptions {
    int repeats = 5;
    std::chrono::duration<double> budget{28.0};
    int max_bi_tasks = 20;
    int max_vi_tasks = 12;
    double vi_eps = 1e-8;
    std::uint64_t seed = 1;
};

std::vector<CompareRow> compare_solvers(const std::vector<int>& task_counts, const CompareOptions& o);

void write_compare_csv(std::ostream& out, const std::vector<CompareRow>& rows);
std::vector<CompareRow> read_compare_csv(std::istream& in);

/// Median runtime per solver against task count, log-scaled runtime axis.
std::string compare_svg(const std::vector<CompareRow>& rows);

/// Reliability heat map over goals x tasks per goal, one panel per (hours, b).
std::string grid_svg(const std::vector<GridRow>& rows);

double median(std::vector<double> v);

} // namespace hsmdp::bench
