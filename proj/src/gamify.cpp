#include "hsmdp/gamify.hpp"

#include <algorithm>
#include <cmath>

#include "hsmdp/distribution.hpp"
#include "hsmdp/errors.hpp"
#include "hsmdp/rewards.hpp"

namespace hsmdp {

namespace {

bool outranks(double pa, double ma, std::size_t ia, double pb, double mb, std::size_t ib) {
    if (nearly_equal(pa, pb)) {
        if (ma != mb) return ma > mb;
        return ia < ib;
    }
    return pa > pb;
}

} // namespace

const IncentivizedTask* Incentives::find(std::size_t goal, std::size_t task) const {
    for (const auto& it : tasks)
        if (it.goal == goal && it.task == task) return &it;
    return nullptr;
}

const IncentivizedTask* Incentives::top() const {
    const IncentivizedTask* best = nullptr;
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        const auto& t = tasks[i];
        if (!best || outranks(t.raw_points, t.expected_minutes, i, best->raw_points,
                              best->expected_minutes, static_cast<std::size_t>(best - tasks.data())))
            best = &t;
    }
    return best;
}

Incentives pseudo_rewards(const Solution& sol, const ToDoList& list, const Config& cfg) {
    Incentives inc;
    inc.v0 = sol.value;
    inc.slack_f_star = sol.slack_value - sol.value;
    for (std::size_t g = 0; g < list.goals.size(); ++g) {
        const Goal& goal = list.goals[g];
        if (sol.goal_mask.width() != list.goals.size())
            throw ConsistencyError("solution does not match the to-do list");
        if (sol.goal_mask.test(g)) continue;
        inc.goal_value_sum += goal.value;
        for (std::size_t i = 0; i < goal.tasks.size(); ++i) {
            if (goal.tasks[i].completed) continue;
            const TaskValue* tv = sol.find(g, i);
            if (!tv) throw ConsistencyError("no Q-value for open task " + goal.tasks[i].id);
            IncentivizedTask it;
            it.goal = g;
            it.task = i;
            it.id = goal.tasks[i].id;
            it.title = goal.tasks[i].title;
            it.q = tv->combined_q;
            it.expected_reward = tv->expected_cost;
            it.expected_minutes = tv->expected_minutes;
            it.f_star = tv->combined_q - tv->expected_cost - sol.value;
            it.f_prime = it.f_star;
            it.raw_points = it.points = it.f_star + it.expected_reward;
            it.display_minutes = display_minutes(goal.tasks[i].est_minutes, cfg);
            it.forced = goal.tasks[i].forced_today;
            inc.tasks.push_back(std::move(it));
        }
    }
    return inc;
}

double round_points(double x, int decimals) {
    const double scale = std::pow(10.0, decimals);
    return std::round(x * scale) / scale;
}

void transform(Incentives& inc, const Config& cfg) {
    if (inc.tasks.empty()) return;
    const double m = cfg.scale_m;
    double sum_f = 0.0, sum_r = 0.0;
    for (const auto& t : inc.tasks) {
        sum_f += t.f_star;
        sum_r += t.expected_reward;
    }
    const double n = static_cast<double>(inc.tasks.size());
    inc.scale_m = m;
    inc.offset_b = (inc.goal_value_sum - m * sum_f - sum_r) / n;
    for (auto& t : inc.tasks) {
        t.f_prime = m * t.f_star + inc.offset_b;
        t.raw_points = t.f_prime + t.expected_reward;
        t.points = round_points(t.raw_points, cfg.round_decimals);
        if (!std::isfinite(t.points)) throw DomainError("non-finite points for task " + t.id);
    }
    inc.slack_points = m * inc.slack_f_star + inc.offset_b;
}

Incentives incentivize(const ToDoList& list, Minutes t0, const Config& cfg, SolverOptions options) {
    const Solution sol = solve_todo_list(list, t0, cfg, options);
    Incentives inc = pseudo_rewards(sol, list, cfg);
    transform(inc, cfg);
    return inc;
}

DailySchedule schedule_today(const Incentives& inc, const ToDoList& list, Minutes today_minutes,
                             const Config& cfg) {
    if (today_minutes <= 0) throw DomainError("today's workload must be positive");
    (void)cfg;
    DailySchedule day;
    day.capacity = today_minutes;

    auto by_points = [&inc](const IncentivizedTask* a, const IncentivizedTask* b) {
        return outranks(a->raw_points, a->expected_minutes,
                        static_cast<std::size_t>(a - inc.tasks.data()), b->raw_points,
                        b->expected_minutes, static_cast<std::size_t>(b - inc.tasks.data()));
    };
    std::vector<const IncentivizedTask*> order;
    for (const auto& t : inc.tasks) order.push_back(&t);
    std::stable_sort(order.begin(), order.end(), by_points);

    std::vector<const IncentivizedTask*> picked;
    for (const auto* t : order) {
        if (!t->forced) continue;
        picked.push_back(t);
        day.total_minutes += t->display_minutes;
        day.has_forced = true;
    }
    day.overflow = day.total_minutes > today_minutes;
    for (const auto* t : order) {
        if (t->forced) continue;
        const Task& task = list.goals.at(t->goal).tasks.at(t->task);
        if (!task.eligible_today) continue;
        if (day.total_minutes + t->display_minutes > today_minutes) continue;
        picked.push_back(t);
        day.total_minutes += t->display_minutes;
    }
    std::stable_sort(picked.begin(), picked.end(), by_points);
    for (const auto* t : picked) day.tasks.push_back(*t);
    return day;
}

std::string format_duration(Minutes minutes) {
    const Minutes h = minutes / 60, m = minutes % 60;
    std::string out = "takes about ";
    if (h > 0) out += std::to_string(h) + (h == 1 ? " hour" : " hours");
    if (h > 0 && m > 0) out += " and ";
    if (m > 0 || h == 0) out += std::to_string(m) + (m == 1 ? " minute" : " minutes");
    return out;
}

namespace {

Minutes likely_duration(const DurationDistribution& d) {
    const DurationPoint* best = &d.support.front();
    for (const auto& pt : d.support)
        if (pt.p > best->p) best = &pt;
    return best->tau;
}

} // namespace

Trajectory simulate_myopic(ToDoList list, const Config& cfg, RewardView view, Minutes t0,
                           SolverOptions options) {
    Trajectory traj;
    Minutes t = t0;
    // Lateness accumulated per goal, used only by the raw view.
    std::vector<double> beta(list.goals.size(), 0.0);
    for (;;) {
        if (list.open_task_count() == 0) break;
        std::optional<std::pair<std::size_t, std::size_t>> choice;

        if (view == RewardView::Shaped) {
            const Incentives inc = incentivize(list, t, cfg, options);
            const IncentivizedTask* top = inc.top();
            if (!top) break;
            if (inc.slack_points > top->raw_points && !nearly_equal(inc.slack_points, top->raw_points)) {
                traj.slacked_off = true;
                break;
            }
            choice = {top->goal, top->task};
        } else {
            double best = 0.0, best_minutes = 0.0;
            for (std::size_t g = 0; g < list.goals.size(); ++g) {
                const Goal& goal = list.goals[g];
                if (goal.completed) continue;
                std::size_t open = 0;
                for (const auto& task : goal.tasks) open += task.completed ? 0 : 1;
                const double loss = goal.loss_rate.value_or(cfg.loss_rate);
                for (std::size_t i = 0; i < goal.tasks.size(); ++i) {
                    const Task& task = goal.tasks[i];
                    if (task.completed) continue;
                    const auto dist = discretize_durations(task.est_minutes, cfg);
                    const Minutes deadline = task.deadline_minutes.value_or(goal.effective_deadline());
                    double r = 0.0;
                    for (const auto& pt : dist.support) {
                        double x = discounted_cost(pt.tau, cfg.gamma, loss);
                        if (open == 1) {
                            const double b = beta[g] + lateness_penalty(t + pt.tau, deadline,
                                                                        cfg.penalty_rate);
                            x += discount(pt.tau, cfg.gamma) * goal.value * penalty_factor(b);
                        }
                        r += pt.p * x;
                    }
                    const double minutes = dist.expectation();
                    if (!choice || outranks(r, minutes, 0, best, best_minutes, 1)) {
                        choice = {g, i};
                        best = r;
                        best_minutes = minutes;
                    }
                }
            }
            if (!choice) break;
            if (cfg.slack_reward > best && !nearly_equal(cfg.slack_reward, best)) {
                traj.slacked_off = true;
                break;
            }
        }

        auto [g, i] = *choice;
        Task& task = list.goals[g].tasks[i];
        traj.steps.push_back({g, i, t});
        const Minutes tau = likely_duration(discretize_durations(task.est_minutes, cfg));
        const Minutes deadline = task.deadline_minutes.value_or(list.goals[g].effective_deadline());
        beta[g] += lateness_penalty(t + tau, deadline, cfg.penalty_rate);
        t += tau;
        task.completed = true;
    }
    return traj;
}

double productivity(const BitmaskState& a, const BitmaskState& b,
                    const std::function<double(const BitmaskState&)>& value) {
    if (b.t == a.t) throw DomainError("productivity needs two distinct time points");
    return (value(b) - value(a)) / static_cast<double>(b.t - a.t);
}

} // namespace hsmdp
