#pragma once

#include <chrono>
#include <cstdint>
#include <optional>

namespace hsmdp {

/// Cooperative wall-clock limit. Solvers call tick() once per expanded node; the clock is
/// read every `check_every` ticks and TimeoutError is thrown once the limit has passed.
class SolveBudget {
public:
    using Clock = std::chrono::steady_clock;

    SolveBudget() = default;
    explicit SolveBudget(std::chrono::duration<double> limit, std::uint32_t check_every = 1024);

    void tick() {
        ++nodes_;
        if (deadline_ && ++since_check_ >= check_every_) check();
    }
    void check();

    std::uint64_t nodes() const { return nodes_; }
    bool limited() const { return deadline_.has_value(); }
    double elapsed_seconds() const;

private:
    Clock::time_point start_ = Clock::now();
    std::optional<Clock::time_point> deadline_;
    std::uint32_t check_every_ = 1024;
    std::uint32_t since_check_ = 0;
    std::uint64_t nodes_ = 0;
};

} // namespace hsmdp
