#pragma once

// Random instance generators and brute-force oracles shared by the test binaries.

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hsmdp/config.hpp"
#include "hsmdp/types.hpp"

namespace testing {

using hsmdp::Config;
using hsmdp::Goal;
using hsmdp::Minutes;
using hsmdp::Task;
using hsmdp::ToDoList;

struct GenOptions {
    int min_goals = 1;
    int max_goals = 3;
    int min_tasks = 1;
    int max_tasks = 4;
    int est_lo = 1;
    int est_hi = 60;
    double value_lo = 10.0;
    double value_hi = 1000.0;
    bool task_deadlines = false;
    bool goal_deadlines = false;
    Minutes deadline_hi = 300;
};

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

    ToDoList todo(const GenOptions& o) {
        ToDoList list;
        const int goals = integer(o.min_goals, o.max_goals);
        for (int g = 0; g < goals; ++g) {
            Goal goal;
            goal.id = "g" + std::to_string(g);
            goal.title = "Goal " + std::to_string(g);
            goal.value = std::round(real(o.value_lo, o.value_hi));
            if (o.goal_deadlines) goal.deadline_minutes = integer(1, static_cast<int>(o.deadline_hi));
            const int tasks = integer(o.min_tasks, o.max_tasks);
            for (int i = 0; i < tasks; ++i) {
                Task t;
                t.id = goal.id + "t" + std::to_string(i);
                t.title = "Task " + std::to_string(g) + "." + std::to_string(i);
                t.est_minutes = integer(o.est_lo, o.est_hi);
                t.goal_id = goal.id;
                if (o.task_deadlines && coin()) t.deadline_minutes = integer(1, static_cast<int>(o.deadline_hi));
                goal.tasks.push_back(std::move(t));
            }
            list.goals.push_back(std::move(goal));
        }
        return list;
    }

    std::mt19937_64& engine() { return rng_; }

private:
    std::mt19937_64 rng_;
};

// ---------------------------------------------------------------------------
// Oracles. Deliberately naive: explicit loops, no shared code with the solvers.

inline double geometric_cost(Minutes tau, double gamma, double loss) {
    double s = 0.0, g = 1.0;
    for (Minutes k = 0; k < tau; ++k) {
        s += g;
        g *= gamma;
    }
    return -loss * s;
}

inline Minutes single_duration(int est, double c_pf) {
    const double x = c_pf * est;
    const double r = std::round(x);
    if (std::abs(x - r) < 1e-9) return static_cast<Minutes>(r);
    return static_cast<Minutes>(std::ceil(x));
}

inline double ztp_pmf_direct(int tau, double k) {
    double log_fact = 0.0;
    for (int i = 2; i <= tau; ++i) log_fact += std::log(static_cast<double>(i));
    return std::exp(tau * std::log(k) - k - log_fact) / (1.0 - std::exp(-k));
}

struct Ref {
    std::size_t goal;
    std::size_t task;
    bool operator==(const Ref&) const = default;
};

/// Best value over every ordering of the open tasks, optionally stopping after any
/// prefix to slack off forever. Deterministic durations only (b = 1).
struct PermutationResult {
    double value = -1e300;
    std::vector<Ref> best;
    std::vector<double> complete_values;   ///< value of each full ordering, in enumeration order
};

inline PermutationResult permutation_oracle(const ToDoList& list, const Config& cfg, Minutes t0,
                                            bool allow_slack = true) {
    std::vector<Ref> refs;
    std::vector<double> remaining_init(list.goals.size(), 0.0);
    for (std::size_t g = 0; g < list.goals.size(); ++g) {
        const Goal& goal = list.goals[g];
        if (goal.completed) continue;
        for (std::size_t i = 0; i < goal.tasks.size(); ++i)
            if (!goal.tasks[i].completed) {
                refs.push_back({g, i});
                remaining_init[g] += 1;
            }
    }
    const double slack = cfg.slack_reward == 0.0 ? 0.0 : cfg.slack_reward / (1.0 - cfg.gamma);
    std::vector<std::size_t> perm(refs.size());
    std::iota(perm.begin(), perm.end(), 0);
    PermutationResult res;
    if (allow_slack && slack > res.value) res.value = slack;
    do {
        std::vector<double> remaining = remaining_init;
        std::vector<double> beta(list.goals.size(), 0.0);
        Minutes t = t0;
        double disc = 1.0, acc = 0.0;
        for (std::size_t k = 0; k < perm.size(); ++k) {
            const Ref r = refs[perm[k]];
            const Goal& goal = list.goals[r.goal];
            const Task& task = goal.tasks[r.task];
            const Minutes tau = single_duration(task.est_minutes, cfg.c_pf);
            const double loss = goal.loss_rate.value_or(cfg.loss_rate);
            acc += disc * geometric_cost(tau, cfg.gamma, loss);
            t += tau;
            disc *= std::pow(cfg.gamma, static_cast<double>(tau));
            const Minutes dl = task.deadline_minutes.value_or(goal.deadline_minutes.value_or(hsmdp::kNoDeadline));
            if (t > dl) beta[r.goal] += cfg.penalty_rate * static_cast<double>(t - dl);
            if (--remaining[r.goal] == 0) acc += disc * goal.value / (1.0 + beta[r.goal]);
            const bool last = k + 1 == perm.size();
            const double v = last ? acc : acc + disc * slack;
            if (last || allow_slack) {
                if (v > res.value + 1e-12 * std::max(1.0, std::abs(v))) {
                    res.value = v;
                    res.best.clear();
                    for (std::size_t j = 0; j <= k; ++j) res.best.push_back(refs[perm[j]]);
                }
            }
            if (last) res.complete_values.push_back(acc);
        }
    } while (std::next_permutation(perm.begin(), perm.end()));
    return res;
}

} // namespace testing
