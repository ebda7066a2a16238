#include "hsmdp/distribution.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/special_functions/gamma.hpp>

#include "hsmdp/errors.hpp"

namespace hsmdp {

namespace {

void check_rate(double k_tilde) {
    if (!(k_tilde > 0.0) || !std::isfinite(k_tilde))
        throw DomainError("zero-truncated Poisson rate must be positive and finite");
}

// c_pf * k is computed in floating point; 1.39 * 100 must still round up to 139.
Minutes ceil_tolerant(double x) {
    return static_cast<Minutes>(std::ceil(x - 1e-9 * std::max(1.0, std::abs(x))));
}

} // namespace

double DurationDistribution::expectation() const {
    double e = 0.0;
    for (const auto& pt : support) e += pt.p * static_cast<double>(pt.tau);
    return e;
}

double DurationDistribution::total_probability() const {
    double s = 0.0;
    for (const auto& pt : support) s += pt.p;
    return s;
}

double ztpoisson_pmf(Minutes tau, double k_tilde) {
    if (tau < 1) throw DomainError("zero-truncated Poisson support starts at 1");
    check_rate(k_tilde);
    const double t = static_cast<double>(tau);
    const double log_p = t * std::log(k_tilde) - k_tilde - std::lgamma(t + 1.0) -
                         std::log(-std::expm1(-k_tilde));
    return std::exp(log_p);
}

double ztpoisson_cdf(Minutes tau, double k_tilde) {
    check_rate(k_tilde);
    if (tau < 1) return 0.0;
    // P(X <= tau) for the untruncated Poisson is Q(tau + 1, k).
    const double untruncated = boost::math::gamma_q(static_cast<double>(tau) + 1.0, k_tilde);
    const double p0 = std::exp(-k_tilde);
    return std::clamp((untruncated - p0) / (-std::expm1(-k_tilde)), 0.0, 1.0);
}

Minutes ztpoisson_quantile(double u, double k_tilde) {
    check_rate(k_tilde);
    if (!(u > 0.0 && u < 1.0)) throw DomainError("quantile level must lie in (0, 1)");
    Minutes lo = 1;
    Minutes hi = static_cast<Minutes>(std::ceil(k_tilde + 40.0 * std::sqrt(k_tilde) + 40.0));
    while (ztpoisson_cdf(hi, k_tilde) < u) hi *= 2;
    while (lo < hi) {
        const Minutes mid = lo + (hi - lo) / 2;
        if (ztpoisson_cdf(mid, k_tilde) >= u) hi = mid;
        else lo = mid + 1;
    }
    return lo;
}

Minutes display_minutes(int est_minutes, const Config& cfg) {
    if (est_minutes < 1) throw DomainError("time estimate must be at least one minute");
    return ceil_tolerant(cfg.c_pf * est_minutes);
}

DurationDistribution discretize_durations(int est_minutes, const Config& cfg) {
    if (est_minutes < 1) throw DomainError("time estimate must be at least one minute");
    if (cfg.n_durations < 1) throw ConfigError("n_durations must be at least 1");
    const double k_tilde = cfg.c_pf * est_minutes;
    check_rate(k_tilde);

    DurationDistribution dist;
    if (cfg.n_durations == 1) {
        dist.support.push_back({ceil_tolerant(k_tilde), 1.0});
        return dist;
    }

    const int b = cfg.n_durations;
    std::vector<Minutes> taus;
    for (int j = 1; j <= b; ++j) {
        const double level = (2.0 * j - 1.0) / (2.0 * b);
        taus.push_back(ztpoisson_quantile(level, k_tilde));
    }
    std::sort(taus.begin(), taus.end());
    taus.erase(std::unique(taus.begin(), taus.end()), taus.end());

    double total = 0.0;
    for (auto tau : taus) {
        const double p = ztpoisson_pmf(tau, k_tilde);
        dist.support.push_back({tau, p});
        total += p;
    }
    for (auto& pt : dist.support) pt.p /= total;
    return dist;
}

} // namespace hsmdp
