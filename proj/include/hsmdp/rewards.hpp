#pragma once

#include <vector>

#include "hsmdp/config.hpp"
#include "hsmdp/types.hpp"

namespace hsmdp {

/// Goal reward multiplier 1 / (1 + beta) for accumulated lateness penalty beta.
double penalty_factor(double beta);

/// Penalty accrued by finishing at `finish` a task due at `deadline`.
double lateness_penalty(Minutes finish, Minutes deadline, double penalty_rate);

/// Reward of working `tau` minutes: -loss_rate * sum_{k < tau} gamma^k.
double discounted_cost(Minutes tau, const Config& cfg);
double discounted_cost(Minutes tau, double gamma, double loss_rate);

/// Value of slacking off forever: slack_reward / (1 - gamma).
double slack_value(const Config& cfg);

/// gamma^tau.
double discount(Minutes tau, double gamma);

/// Percentage of states saved by the two-level decomposition for the given goal sizes.
double state_space_reduction(const std::vector<int>& goal_sizes);

} // namespace hsmdp
