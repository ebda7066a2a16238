#include "hsmdp/flat.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "hsmdp/distribution.hpp"
#include "hsmdp/errors.hpp"
#include "hsmdp/hsolver.hpp"
#include "hsmdp/qtable.hpp"
#include "hsmdp/rewards.hpp"

namespace hsmdp {

namespace {

constexpr std::size_t kHardCap = 30;

struct Choice {
    int action = kTerminalAction;
    double q = 0.0;
    double minutes = 0.0;
};

// Larger Q wins; near-ties go to the longer task, then the lower index.
bool better(const Choice& c, const Choice& best) {
    if (best.action == kTerminalAction) return true;
    if (nearly_equal(c.q, best.q)) {
        if (c.minutes != best.minutes) return c.minutes > best.minutes;
        return c.action < best.action;
    }
    return c.q > best.q;
}

} // namespace

FlatModel build_flat(const ToDoList& list, const Config& cfg, Minutes t0, std::size_t cap) {
    cfg.validate();
    FlatModel m;
    m.cfg = cfg;
    m.t0 = t0;
    for (std::size_t g = 0; g < list.goals.size(); ++g) {
        const Goal& goal = list.goals[g];
        if (goal.completed || goal.tasks.empty() || goal.all_tasks_completed()) continue;
        const double loss = goal.loss_rate.value_or(cfg.loss_rate);
        const int mg = static_cast<int>(m.goal_value.size());
        m.goal_value.push_back(goal.value);
        m.goal_source.push_back(g);
        m.goal_members.push_back(0);
        for (std::size_t i = 0; i < goal.tasks.size(); ++i) {
            const Task& task = goal.tasks[i];
            const std::size_t bit = m.tasks.size();
            if (bit >= std::min(cap, kHardCap))
                throw DomainError("flat model limited to " + std::to_string(std::min(cap, kHardCap)) +
                                  " tasks");
            FlatTask ft;
            ft.goal = g;
            ft.task = i;
            ft.deadline = task.deadline_minutes.value_or(goal.effective_deadline());
            const auto dist = discretize_durations(task.est_minutes, cfg);
            for (const auto& pt : dist.support) {
                ft.outcomes.push_back({pt.tau, pt.p, discounted_cost(pt.tau, cfg.gamma, loss),
                                       discount(pt.tau, cfg.gamma)});
                ft.expected_cost += pt.p * ft.outcomes.back().cost;
            }
            ft.expected_minutes = dist.expectation();
            m.tasks.push_back(std::move(ft));
            m.task_goal.push_back(mg);
            m.goal_members.back() |= std::uint32_t{1} << bit;
            if (task.completed) m.initial_mask |= std::uint32_t{1} << bit;
        }
    }
    return m;
}

std::size_t FlatStateHash::operator()(const FlatState& s) const noexcept {
    std::size_t h = std::hash<std::uint32_t>{}(s.mask);
    auto mix = [&h](std::size_t v) { h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2); };
    mix(std::hash<Minutes>{}(s.t));
    for (double b : s.beta) mix(std::hash<double>{}(b));
    return h;
}

void FlatSolution::build_graph(const FlatModel& model, FlatSolution& sol, SolveBudget* budget) {
    const bool penalties = model.cfg.penalty_rate > 0.0;
    FlatState start{model.initial_mask, model.t0, {}};
    if (penalties) start.beta.assign(model.goal_value.size(), 0.0);
    sol.states_.push_back(start);
    sol.index_.emplace(start, 0);

    const std::uint32_t full = model.full_mask();
    // Breadth-first over completion layers, so every successor lands at a larger index.
    for (std::size_t i = 0; i < sol.states_.size(); ++i) {
        if (budget) budget->tick();
        std::vector<Transition> trans;
        const FlatState s = sol.states_[i];
        if (s.mask != full) {
            for (std::size_t a = 0; a < model.size(); ++a) {
                const std::uint32_t bit = std::uint32_t{1} << a;
                if (s.mask & bit) continue;
                const FlatTask& task = model.tasks[a];
                const int mg = model.task_goal[a];
                const std::uint32_t members = model.goal_members[mg];
                const std::uint32_t next_mask = s.mask | bit;
                const bool goal_done = (next_mask & members) == members;
                for (const auto& o : task.outcomes) {
                    FlatState n{next_mask, s.t + o.tau, s.beta};
                    double beta_g = 0.0;
                    if (penalties) {
                        n.beta[mg] += lateness_penalty(n.t, task.deadline, model.cfg.penalty_rate);
                        beta_g = n.beta[mg];
                        if (goal_done) n.beta[mg] = 0.0;
                    }
                    double reward = o.cost;
                    if (goal_done) reward += o.disc * model.goal_value[mg] * penalty_factor(beta_g);
                    auto [it, inserted] =
                        sol.index_.emplace(n, static_cast<std::uint32_t>(sol.states_.size()));
                    if (inserted) sol.states_.push_back(std::move(n));
                    trans.push_back({static_cast<int>(a), o.p, reward, o.disc, it->second});
                }
            }
        }
        sol.transitions_.push_back(std::move(trans));
    }
}

namespace {

// Q-values of every action at state i given successor values V.
template <class Trans>
std::vector<std::pair<int, double>> action_values(const std::vector<Trans>& trans,
                                                  const std::vector<double>& V) {
    std::vector<std::pair<int, double>> out;
    for (const auto& tr : trans) {
        const double contrib = tr.p * (tr.reward + tr.disc * V[tr.next]);
        if (out.empty() || out.back().first != tr.action)
            out.emplace_back(tr.action, contrib);
        else
            out.back().second += contrib;
    }
    return out;
}

} // namespace

FlatSolution backward_induction(const FlatModel& model, SolveBudget* budget) {
    FlatSolution sol;
    FlatSolution::build_graph(model, sol, budget);
    const double slack = slack_value(model.cfg);
    const std::size_t n = sol.states_.size();
    sol.values_.assign(n, 0.0);
    sol.policy_.assign(n, kTerminalAction);
    sol.q_.assign(n, {});
    sol.slack_q_ = slack;
    const std::uint32_t full = model.full_mask();

    for (std::size_t k = n; k-- > 0;) {
        if (budget) budget->tick();
        if (sol.states_[k].mask == full) {
            sol.q_[k] = {{kTerminalAction, 0.0}};
            continue;
        }
        auto qs = action_values(sol.transitions_[k], sol.values_);
        Choice best;
        for (const auto& [a, q] : qs) {
            Choice c{a, q, model.tasks[a].expected_minutes};
            if (better(c, best)) best = c;
        }
        if (slack > best.q && !nearly_equal(slack, best.q)) best = {kSlackAction, slack, 0.0};
        qs.emplace_back(kSlackAction, slack);
        sol.q_[k] = std::move(qs);
        sol.values_[k] = best.q;
        sol.policy_[k] = best.action;
    }
    return sol;
}

FlatSolution value_iteration(const FlatModel& model, double eps, int max_sweeps,
                             SolveBudget* budget) {
    const double gamma = model.cfg.gamma;
    if (!(gamma < 1.0)) throw ConfigError("value iteration requires gamma < 1");
    if (!(eps > 0.0)) throw ConfigError("value iteration tolerance must be positive");
    FlatSolution sol;
    FlatSolution::build_graph(model, sol, budget);
    const double R = model.cfg.slack_reward;
    const std::size_t n = sol.states_.size();
    const std::uint32_t full = model.full_mask();
    std::vector<double> V(n, 0.0), next(n, 0.0);
    double v_slack = 0.0;
    const double threshold = eps * (1.0 - gamma) / gamma;

    int sweep = 0;
    for (;;) {
        if (sweep >= max_sweeps)
            throw ConvergenceError("value iteration did not converge in " +
                                   std::to_string(max_sweeps) + " sweeps");
        ++sweep;
        double residual = 0.0;
        const double slack_q = R + gamma * v_slack;
        for (std::size_t k = 0; k < n; ++k) {
            if (budget) budget->tick();
            if (sol.states_[k].mask == full) {
                next[k] = 0.0;
                continue;
            }
            double best = slack_q, q = 0.0;
            int action = kTerminalAction;
            for (const auto& tr : sol.transitions_[k]) {
                if (tr.action != action) {
                    if (action != kTerminalAction) best = std::max(best, q);
                    action = tr.action;
                    q = 0.0;
                }
                q += tr.p * (tr.reward + tr.disc * V[tr.next]);
            }
            if (action != kTerminalAction) best = std::max(best, q);
            next[k] = best;
            residual = std::max(residual, std::abs(next[k] - V[k]));
        }
        residual = std::max(residual, std::abs(slack_q - v_slack));
        v_slack = slack_q;
        V.swap(next);
        if (residual < threshold) break;
    }

    sol.sweeps_ = sweep;
    sol.slack_q_ = R + gamma * v_slack;
    sol.values_ = V;
    sol.policy_.assign(n, kTerminalAction);
    sol.q_.assign(n, {});
    for (std::size_t k = 0; k < n; ++k) {
        if (sol.states_[k].mask == full) {
            sol.q_[k] = {{kTerminalAction, 0.0}};
            continue;
        }
        auto qs = action_values(sol.transitions_[k], V);
        Choice best;
        for (const auto& [a, q] : qs) {
            Choice c{a, q, model.tasks[a].expected_minutes};
            if (better(c, best)) best = c;
        }
        if (sol.slack_q_ > best.q && !nearly_equal(sol.slack_q_, best.q))
            best = {kSlackAction, sol.slack_q_, 0.0};
        qs.emplace_back(kSlackAction, sol.slack_q_);
        sol.q_[k] = std::move(qs);
        sol.policy_[k] = best.action;
    }
    return sol;
}

std::optional<double> FlatSolution::value(const FlatState& s) const {
    auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return values_[it->second];
}

std::optional<int> FlatSolution::policy(const FlatState& s) const {
    auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    return policy_[it->second];
}

std::optional<double> FlatSolution::q(const FlatState& s, int action) const {
    auto it = index_.find(s);
    if (it == index_.end()) return std::nullopt;
    for (const auto& [a, v] : q_[it->second])
        if (a == action) return v;
    return std::nullopt;
}

std::vector<std::size_t> FlatSolution::rollout() const {
    std::vector<std::size_t> path;
    std::uint32_t k = 0;
    while (policy_.at(k) >= 0) {
        const int a = policy_[k];
        path.push_back(static_cast<std::size_t>(a));
        const Transition* pick = nullptr;
        for (const auto& tr : transitions_[k])
            if (tr.action == a && (!pick || tr.p > pick->p)) pick = &tr;
        k = pick->next;
    }
    return path;
}

} // namespace hsmdp
