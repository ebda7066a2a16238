#pragma once

#include <optional>

namespace hsmdp {

struct Range {
    double lo = 0.0;
    double hi = 0.0;

    bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Parameters shared by every solver. Time is measured in minutes.
struct Config {
    double gamma = 0.999999;      ///< discount per minute
    double loss_rate = 0.1;       ///< cost per minute of work
    double penalty_rate = 0.01;   ///< goal penalty per minute past a task deadline
    double c_pf = 1.39;           ///< planning fallacy inflation of estimates
    double slack_reward = 1e-4;   ///< per-step reward of the slack-off action
    int n_durations = 1;          ///< support size of each task duration distribution
    double scale_m = 1.1;
    int round_decimals = 0;
    Range value_range{1.0, 1e5};
    Range avg_value_range{0.01, 100.0};   ///< goal value per estimated minute

    /// Throws ConfigError when a field is out of range.
    void validate() const;
};

} // namespace hsmdp
