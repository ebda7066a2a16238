#include "hsmdp/hsolver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <tuple>

#include "hsmdp/errors.hpp"
#include "hsmdp/rewards.hpp"

namespace hsmdp {

namespace {
// Past this many entries the task-level memo stops growing; lookups continue.
constexpr std::size_t kMemoLimit = std::size_t{1} << 21;
} // namespace

// ---------------------------------------------------------------------------
// QTable / SolveBudget

void QTable::record(const StateKey& key, int action, double q) {
    auto& values = entries_[key].values;
    for (auto& av : values) {
        if (av.action == action) {
            av.q = q;
            return;
        }
    }
    values.push_back({action, q});
}

void QTable::set_policy(const StateKey& key, int action) { entries_[key].policy = action; }

const QTable::Entry* QTable::find(const StateKey& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? nullptr : &it->second;
}

std::optional<double> QTable::q(const StateKey& key, int action) const {
    if (const auto* e = find(key))
        for (const auto& av : e->values)
            if (av.action == action) return av.q;
    return std::nullopt;
}

std::optional<int> QTable::policy(const StateKey& key) const {
    if (const auto* e = find(key)) return e->policy;
    return std::nullopt;
}

std::optional<double> QTable::value(const StateKey& key) const {
    auto a = policy(key);
    if (!a) return std::nullopt;
    return q(key, *a);
}

SolveBudget::SolveBudget(std::chrono::duration<double> limit, std::uint32_t check_every)
    : deadline_(start_ + std::chrono::duration_cast<Clock::duration>(limit)),
      check_every_(std::max<std::uint32_t>(1, check_every)) {}

void SolveBudget::check() {
    since_check_ = 0;
    if (deadline_ && Clock::now() >= *deadline_)
        throw TimeoutError("solve budget exhausted after " + std::to_string(nodes_) + " nodes");
}

double SolveBudget::elapsed_seconds() const {
    return std::chrono::duration<double>(Clock::now() - start_).count();
}

// ---------------------------------------------------------------------------

bool nearly_equal(double a, double b, double rel) {
    return std::abs(a - b) <= rel * std::max({1.0, std::abs(a), std::abs(b)});
}

TaskQueue build_task_queue(const Goal& goal, std::size_t goal_index) {
    TaskQueue q;
    q.goal = goal_index;
    for (std::size_t i = 0; i < goal.tasks.size(); ++i)
        if (!goal.tasks[i].completed) q.order.push_back(i);
    auto deadline_of = [&](std::size_t i) {
        return goal.tasks[i].deadline_minutes.value_or(goal.effective_deadline());
    };
    std::stable_sort(q.order.begin(), q.order.end(),
                     [&](std::size_t a, std::size_t b) { return deadline_of(a) < deadline_of(b); });
    for (auto i : q.order) q.deadlines.push_back(deadline_of(i));
    return q;
}

const TaskValue* Solution::find(std::size_t goal, std::size_t task) const {
    for (const auto& tv : task_values)
        if (tv.goal == goal && tv.task == task) return &tv;
    return nullptr;
}

std::optional<TaskValue> Solution::best_task() const {
    std::optional<TaskValue> best;
    for (const auto& tv : task_values) {
        if (!best) {
            best = tv;
            continue;
        }
        if (nearly_equal(tv.combined_q, best->combined_q)) {
            if (tv.expected_minutes > best->expected_minutes) best = tv;
        } else if (tv.combined_q > best->combined_q) {
            best = tv;
        }
    }
    return best;
}

std::size_t HierarchicalSolver::NodeKeyHash::operator()(const NodeKey& k) const noexcept {
    std::size_t h = k.mask.hash();
    h ^= std::hash<Minutes>{}(k.t) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    h ^= std::hash<double>{}(k.beta) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    return h;
}

HierarchicalSolver::HierarchicalSolver(const ToDoList& list, const Config& cfg,
                                       SolverOptions options)
    : list_(list), cfg_(cfg), options_(options) {
    cfg_.validate();
    slack_ = slack_value(cfg_);
    goals_.resize(list_.goals.size());
    for (std::size_t g = 0; g < list_.goals.size(); ++g) {
        const Goal& goal = list_.goals[g];
        GoalData& gd = goals_[g];
        if (goal.value < 0.0) throw DomainError("goal value must be nonnegative");
        const double loss = goal.loss_rate.value_or(cfg_.loss_rate);
        gd.value = goal.value;
        gd.initial = Bitmask(goal.tasks.size());
        gd.queue = build_task_queue(goal, g);
        gd.open = !goal.completed && !goal.tasks.empty() && !goal.all_tasks_completed();
        double expected_total = 0.0;
        for (std::size_t i = 0; i < goal.tasks.size(); ++i) {
            const Task& task = goal.tasks[i];
            if (task.completed || goal.completed) gd.initial.set(i);
            gd.dists.push_back(discretize_durations(task.est_minutes, cfg_));
            gd.deadline.push_back(task.deadline_minutes.value_or(goal.effective_deadline()));
            std::vector<Outcome> out;
            for (const auto& pt : gd.dists.back().support)
                out.push_back({pt.tau, pt.p, discounted_cost(pt.tau, cfg_.gamma, loss),
                               discount(pt.tau, cfg_.gamma)});
            gd.branching = gd.branching || out.size() > 1;
            gd.outcomes.push_back(std::move(out));
            if (!gd.initial.test(i)) expected_total += gd.dists.back().expectation();
        }
        gd.tau = static_cast<Minutes>(std::llround(expected_total));
        gd.disc = discount(gd.tau, cfg_.gamma);
    }
}

void HierarchicalSolver::tick() {
    if (options_.budget) options_.budget->tick();
}

double HierarchicalSolver::expand(std::size_t g, std::size_t pos, const Bitmask& mask, Minutes t,
                                  double beta, std::optional<std::size_t> action, QTable* table) {
    tick();
    GoalData& gd = goals_[g];
    const auto& order = gd.queue.order;
    std::size_t child_pos = pos;
    std::size_t a = 0;

    if (!action) {
        while (pos < order.size() && mask.test(order[pos])) ++pos;
        if (pos == order.size()) {
            const double reward = gd.value * penalty_factor(beta);
            if (options_.trace && options_.trace->on_terminal)
                options_.trace->on_terminal(g, t, beta, reward);
            if (table) {
                const StateKey key{mask, t, beta};
                table->record(key, kTerminalAction, reward);
                table->set_policy(key, kTerminalAction);
            }
            return reward;
        }
        a = order[pos];
        child_pos = pos + 1;
        if (gd.branching) {
            auto it = memo_.find(NodeKey{mask, t, beta});
            if (it != memo_.end()) return it->second;
        }
    } else {
        a = *action;
        if (mask.test(a)) throw IllegalTransition("task is already completed");
    }

    Bitmask next_mask = mask;
    next_mask.set(a);
    const Minutes deadline = gd.deadline[a];
    double q = 0.0;
    double p_sum = 0.0;
    for (const Outcome& o : gd.outcomes[a]) {
        const Minutes t_next = t + o.tau;
        const double beta_next = beta + lateness_penalty(t_next, deadline, cfg_.penalty_rate);
        if (options_.trace && options_.trace->on_transition)
            options_.trace->on_transition(g, t, t_next, beta, beta_next);
        const double v_next = expand(g, child_pos, next_mask, t_next, beta_next, std::nullopt, table);
        q += o.p * (o.cost + o.disc * v_next);
        p_sum += o.p;
    }
    if (options_.trace && options_.trace->on_expand) options_.trace->on_expand(g, p_sum);

    if (!action) {
        if (gd.branching && memo_.size() < kMemoLimit) memo_.emplace(NodeKey{mask, t, beta}, q);
        if (table) {
            const StateKey key{mask, t, beta};
            table->record(key, static_cast<int>(a), q);
            table->set_policy(key, static_cast<int>(a));
        }
    }
    return q;
}

double HierarchicalSolver::solve_next_tasks(std::size_t g, Minutes t, double beta, std::size_t pos,
                                            std::optional<std::size_t> action) {
    if (g >= goals_.size()) throw DomainError("goal index out of range");
    if (pos > goals_[g].queue.order.size()) throw DomainError("queue position out of range");
    memo_.clear();
    return expand(g, pos, goals_[g].initial, t, beta, action, nullptr);
}

QTable HierarchicalSolver::solve_goal(std::size_t g, Minutes t_start, Minutes t0) {
    if (g >= goals_.size()) throw DomainError("goal index out of range");
    GoalData& gd = goals_[g];
    if (!gd.open) throw DomainError("goal has no open tasks");
    QTable table(Level::Task);
    QTable* detail = options_.record_task_states ? &table : nullptr;
    memo_.clear();
    const StateKey root{gd.initial, t_start, 0.0};

    if (t_start == t0) {
        std::optional<std::size_t> best;
        double best_q = 0.0;
        // The queue holds exactly the open tasks, in deadline order.
        for (std::size_t a : gd.queue.order) {
            const double q = expand(g, 0, gd.initial, t_start, 0.0, a, detail);
            table.record(root, static_cast<int>(a), q);
            bool take = !best;
            if (best) {
                if (nearly_equal(q, best_q)) {
                    const double ea = gd.dists[a].expectation();
                    const double eb = gd.dists[*best].expectation();
                    take = ea > eb || (ea == eb && a < *best);
                } else {
                    take = q > best_q;
                }
            }
            if (take) {
                best = a;
                best_q = q;
            }
        }
        table.set_policy(root, static_cast<int>(*best));
    } else if (detail) {
        expand(g, 0, gd.initial, t_start, 0.0, std::nullopt, detail);
    } else {
        const auto& order = gd.queue.order;
        const auto first = std::find_if(order.begin(), order.end(), [&](std::size_t a) { return !gd.initial.test(a); });
        const double q = expand(g, 0, gd.initial, t_start, 0.0, std::nullopt, nullptr);
        const int a = first == order.end() ? kTerminalAction : static_cast<int>(*first);
        table.record(root, a, q);
        table.set_policy(root, a);
    }
    memo_.clear();
    return table;
}

double HierarchicalSolver::goal_entry_value(std::size_t g, Minutes t) {
    if (t == t0_ && g < t0_tables_.size() && t0_tables_[g].size() > 0)
        return *t0_tables_[g].value(StateKey{goals_[g].initial, t, 0.0});
    const auto key = std::make_pair(g, t);
    if (auto it = entry_cache_.find(key); it != entry_cache_.end()) return it->second;
    memo_.clear();
    const double v = expand(g, 0, goals_[g].initial, t, 0.0, std::nullopt, nullptr);
    memo_.clear();
    entry_cache_.emplace(key, v);
    return v;
}

double HierarchicalSolver::next_goals(const Bitmask& mask, Minutes t, QTable& table) {
    tick();
    if (options_.memoize_goal_level) {
        if (auto it = goal_memo_.find(mask); it != goal_memo_.end()) return it->second;
    }
    const StateKey key{mask, t, 0.0};
    bool any_open = false;
    for (std::size_t g = 0; g < goals_.size(); ++g) any_open = any_open || !mask.test(g);
    if (!any_open) {
        table.record(key, kTerminalAction, 0.0);
        table.set_policy(key, kTerminalAction);
        if (options_.memoize_goal_level) goal_memo_.emplace(mask, 0.0);
        return 0.0;
    }

    table.record(key, kSlackAction, slack_);
    std::optional<std::size_t> best;
    double best_q = 0.0;
    for (std::size_t g = 0; g < goals_.size(); ++g) {
        if (mask.test(g)) continue;
        const double r = goal_entry_value(g, t);
        Bitmask next = mask;
        next.set(g);
        const double v_next = next_goals(next, t + goals_[g].tau, table);
        const double q = r + goals_[g].disc * v_next;
        table.record(key, static_cast<int>(g), q);
        if (!best || (q > best_q && !nearly_equal(q, best_q))) {
            best = g;
            best_q = q;
        }
    }
    int policy = static_cast<int>(*best);
    double value = best_q;
    if (slack_ > best_q && !nearly_equal(slack_, best_q)) {
        policy = kSlackAction;
        value = slack_;
    }
    table.set_policy(key, policy);
    if (options_.memoize_goal_level) goal_memo_.emplace(mask, value);
    return value;
}

QTable HierarchicalSolver::solve_next_goals(const BitmaskState& start) {
    if (start.mask.width() != goals_.size())
        throw DomainError("goal mask width does not match the number of goals");
    goal_memo_.clear();
    entry_cache_.clear();
    t0_ = start.t;
    t0_tables_.clear();
    Bitmask mask = start.mask;
    for (std::size_t g = 0; g < goals_.size(); ++g)
        if (!goals_[g].open && !mask.test(g)) mask.set(g);
    QTable table(Level::Goal);
    next_goals(mask, start.t, table);
    return table;
}

Solution HierarchicalSolver::solve(Minutes t0) {
    if (list_.goals.empty()) throw DomainError("empty to-do list");
    t0_ = t0;
    goal_memo_.clear();
    entry_cache_.clear();
    t0_tables_.assign(goals_.size(), QTable(Level::Task));

    Solution sol;
    sol.t0 = t0;
    sol.slack_value = slack_;
    sol.goal_mask = Bitmask(goals_.size());
    for (std::size_t g = 0; g < goals_.size(); ++g) {
        if (!goals_[g].open) {
            sol.goal_mask.set(g);
            continue;
        }
        t0_tables_[g] = solve_goal(g, t0, t0);
    }

    sol.value = next_goals(sol.goal_mask, t0, sol.goal_table);

    Bitmask mask = sol.goal_mask;
    Minutes t = t0;
    while (true) {
        auto a = sol.goal_table.policy(StateKey{mask, t, 0.0});
        if (!a || *a < 0) break;
        const auto g = static_cast<std::size_t>(*a);
        sol.goal_order.push_back(g);
        mask.set(g);
        t += goals_[g].tau;
    }

    for (std::size_t g = 0; g < goals_.size(); ++g) {
        if (!goals_[g].open) continue;
        Bitmask after = sol.goal_mask;
        after.set(g);
        const auto next_value = sol.goal_table.value(StateKey{after, t0 + goals_[g].tau, 0.0});
        if (!next_value) throw ConsistencyError("goal-level value missing for successor state");
        const StateKey root{goals_[g].initial, t0, 0.0};
        for (std::size_t a : goals_[g].queue.order) {
            const auto q = t0_tables_[g].q(root, static_cast<int>(a));
            if (!q) throw ConsistencyError("task-level value missing at the initial state");
            TaskValue tv;
            tv.goal = g;
            tv.task = a;
            tv.task_q = *q;
            tv.combined_q = *q + goals_[g].disc * *next_value;
            tv.expected_minutes = goals_[g].dists[a].expectation();
            for (const auto& o : goals_[g].outcomes[a]) tv.expected_cost += o.p * o.cost;
            sol.task_values.push_back(tv);
        }
    }
    std::sort(sol.task_values.begin(), sol.task_values.end(),
              [](const TaskValue& x, const TaskValue& y) {
                  return std::tie(x.goal, x.task) < std::tie(y.goal, y.task);
              });
    sol.task_tables = std::move(t0_tables_);
    t0_tables_.clear();
    return sol;
}

Solution solve_todo_list(const ToDoList& list, Minutes t0, const Config& cfg,
                         SolverOptions options) {
    HierarchicalSolver solver(list, cfg, options);
    return solver.solve(t0);
}

double complexity_guard(const ToDoList& list, const Config& cfg) {
    double nodes = 0.0;
    int open_goals = 0;
    for (const auto& goal : list.goals) {
        if (goal.completed) continue;
        int n = 0;
        for (const auto& t : goal.tasks)
            if (!t.completed) ++n;
        if (n == 0) continue;
        ++open_goals;
        nodes += std::pow(static_cast<double>(n), cfg.n_durations) * n;
    }
    if (open_goals > 0) nodes += std::ldexp(1.0, open_goals) * open_goals;
    return nodes;
}

} // namespace hsmdp
