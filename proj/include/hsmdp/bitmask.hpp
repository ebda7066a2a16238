#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "hsmdp/types.hpp"

namespace hsmdp {

/// Fixed-width bit vector; bit i set means item i is completed.
class Bitmask {
public:
    Bitmask() = default;
    explicit Bitmask(std::size_t width);

    /// Builds a mask from a string of '0'/'1', most significant (highest index) bit first.
    static Bitmask from_string(const std::string& bits);

    std::size_t width() const { return width_; }
    bool test(std::size_t i) const;
    void set(std::size_t i);
    std::size_t count() const;
    bool all() const { return count() == width_; }
    bool none() const { return count() == 0; }

    /// True when every bit set in `other` is also set here.
    bool contains(const Bitmask& other) const;

    std::string to_string() const;
    std::size_t hash() const;

    friend bool operator==(const Bitmask&, const Bitmask&) = default;
    friend auto operator<=>(const Bitmask& a, const Bitmask& b) {
        if (auto c = a.width_ <=> b.width_; c != 0) return c;
        return a.words_ <=> b.words_;
    }

private:
    std::size_t width_ = 0;
    std::vector<std::uint64_t> words_;
};

struct BitmaskState {
    Bitmask mask;
    Minutes t = 0;

    friend bool operator==(const BitmaskState&, const BitmaskState&) = default;
};

/// Completes item `i` taking `tau` minutes. Throws IllegalTransition if already completed.
BitmaskState apply_action(const BitmaskState& s, std::size_t i, Minutes tau);

} // namespace hsmdp

template <>
struct std::hash<hsmdp::Bitmask> {
    std::size_t operator()(const hsmdp::Bitmask& m) const noexcept { return m.hash(); }
};
