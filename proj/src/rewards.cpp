#include "hsmdp/rewards.hpp"

#include <cmath>

#include "hsmdp/errors.hpp"

namespace hsmdp {

double penalty_factor(double beta) {
    if (!(beta >= 0.0)) throw DomainError("penalty beta must be nonnegative");
    return 1.0 / (1.0 + beta);
}

double lateness_penalty(Minutes finish, Minutes deadline, double penalty_rate) {
    if (finish <= deadline) return 0.0;
    return static_cast<double>(finish - deadline) * penalty_rate;
}

double discount(Minutes tau, double gamma) {
    return std::pow(gamma, static_cast<double>(tau));
}

double discounted_cost(Minutes tau, double gamma, double loss_rate) {
    if (tau < 1) throw DomainError("task duration must be at least one time unit");
    if (gamma >= 1.0) return -loss_rate * static_cast<double>(tau);
    // (1 - gamma^tau) / (1 - gamma), stable for gamma close to one.
    const double num = -std::expm1(static_cast<double>(tau) * std::log(gamma));
    return -loss_rate * num / (1.0 - gamma);
}

double discounted_cost(Minutes tau, const Config& cfg) {
    return discounted_cost(tau, cfg.gamma, cfg.loss_rate);
}

double slack_value(const Config& cfg) {
    if (cfg.slack_reward == 0.0) return 0.0;
    if (cfg.gamma >= 1.0)
        throw ConfigError("slack value diverges for gamma >= 1");
    return cfg.slack_reward / (1.0 - cfg.gamma);
}

double state_space_reduction(const std::vector<int>& goal_sizes) {
    if (goal_sizes.size() < 2) throw DomainError("state space reduction needs at least two goals");
    double hierarchical = std::ldexp(1.0, static_cast<int>(goal_sizes.size()));
    double log2_flat = 0.0;
    for (int n : goal_sizes) {
        if (n < 2) throw DomainError("state space reduction needs at least two tasks per goal");
        hierarchical += std::ldexp(1.0, n);
        log2_flat += n;
    }
    return (1.0 - hierarchical / std::exp2(log2_flat)) * 100.0;
}

} // namespace hsmdp
