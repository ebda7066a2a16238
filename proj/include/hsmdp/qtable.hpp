#pragma once

#include <compare>
#include <map>
#include <optional>
#include <vector>

#include "hsmdp/bitmask.hpp"

namespace hsmdp {

inline constexpr int kSlackAction = -1;
inline constexpr int kTerminalAction = -2;   ///< a-dagger at task level, bottom at goal level

enum class Level { Goal, Task };

struct StateKey {
    Bitmask mask;
    Minutes t = 0;
    double beta = 0.0;   ///< accumulated penalty; always 0 at goal level

    friend auto operator<=>(const StateKey&, const StateKey&) = default;
    friend bool operator==(const StateKey&, const StateKey&) = default;
};

struct ActionValue {
    int action = kTerminalAction;
    double q = 0.0;
};

/// Q-values recorded by a solver, keyed on (mask, t, beta), with the stored greedy action.
class QTable {
public:
    struct Entry {
        std::vector<ActionValue> values;
        std::optional<int> policy;
    };

    QTable() = default;
    explicit QTable(Level level) : level_(level) {}

    Level level() const { return level_; }

    void record(const StateKey& key, int action, double q);
    void set_policy(const StateKey& key, int action);

    std::optional<double> q(const StateKey& key, int action) const;
    std::optional<int> policy(const StateKey& key) const;
    /// Q-value of the stored policy action.
    std::optional<double> value(const StateKey& key) const;

    const Entry* find(const StateKey& key) const;
    const std::map<StateKey, Entry>& entries() const { return entries_; }
    std::size_t size() const { return entries_.size(); }

private:
    Level level_ = Level::Task;
    std::map<StateKey, Entry> entries_;
};

} // namespace hsmdp
