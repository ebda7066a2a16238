#pragma once

#include <vector>

#include "hsmdp/config.hpp"
#include "hsmdp/types.hpp"

namespace hsmdp {

struct DurationPoint {
    Minutes tau = 1;
    double p = 1.0;
};

/// Finite support of a task's duration, probabilities summing to one.
struct DurationDistribution {
    std::vector<DurationPoint> support;

    double expectation() const;
    double total_probability() const;
};

/// Zero-truncated Poisson pmf  k^tau e^-k / (tau! (1 - e^-k)), evaluated in log space.
double ztpoisson_pmf(Minutes tau, double k_tilde);

/// P(T <= tau) for T ~ ZTPoisson(k_tilde).
double ztpoisson_cdf(Minutes tau, double k_tilde);

/// Smallest tau >= 1 with cdf(tau) >= u, for u in (0, 1).
Minutes ztpoisson_quantile(double u, double k_tilde);

/// Estimate shown to the user: ceil(c_pf * k).
Minutes display_minutes(int est_minutes, const Config& cfg);

/// Collapses ZTPoisson(c_pf * k) to at most cfg.n_durations points.
///
/// One point: ceil(c_pf * k). Otherwise the quantiles at (2j - 1) / (2b), j = 1..b,
/// deduplicated, weighted by the pmf renormalized over the support.
DurationDistribution discretize_durations(int est_minutes, const Config& cfg);

} // namespace hsmdp
