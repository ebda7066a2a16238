#include "hsmdp/bitmask.hpp"

#include <bit>

#include "hsmdp/errors.hpp"

namespace hsmdp {

Bitmask::Bitmask(std::size_t width) : width_(width), words_((width + 63) / 64, 0) {}

Bitmask Bitmask::from_string(const std::string& bits) {
    Bitmask m(bits.size());
    for (std::size_t k = 0; k < bits.size(); ++k) {
        const char c = bits[bits.size() - 1 - k];
        if (c == '1') m.set(k);
        else if (c != '0') throw DomainError("bitmask string may contain only 0 and 1");
    }
    return m;
}

bool Bitmask::test(std::size_t i) const {
    if (i >= width_) throw DomainError("bit index out of range");
    return (words_[i / 64] >> (i % 64)) & 1u;
}

void Bitmask::set(std::size_t i) {
    if (i >= width_) throw DomainError("bit index out of range");
    words_[i / 64] |= std::uint64_t{1} << (i % 64);
}

std::size_t Bitmask::count() const {
    std::size_t n = 0;
    for (auto w : words_) n += static_cast<std::size_t>(std::popcount(w));
    return n;
}

bool Bitmask::contains(const Bitmask& other) const {
    if (other.width_ != width_) return false;
    for (std::size_t k = 0; k < words_.size(); ++k)
        if ((words_[k] & other.words_[k]) != other.words_[k]) return false;
    return true;
}

std::string Bitmask::to_string() const {
    std::string s(width_, '0');
    for (std::size_t i = 0; i < width_; ++i)
        if (test(i)) s[width_ - 1 - i] = '1';
    return s;
}

std::size_t Bitmask::hash() const {
    std::size_t h = width_ * 0x9e3779b97f4a7c15ull;
    for (auto w : words_) h = (h ^ w) * 0x100000001b3ull + (h >> 29);
    return h;
}

BitmaskState apply_action(const BitmaskState& s, std::size_t i, Minutes tau) {
    if (tau < 0) throw DomainError("transition time must be nonnegative");
    if (s.mask.test(i))
        throw IllegalTransition("item " + std::to_string(i) + " is already completed");
    BitmaskState next = s;
    next.mask.set(i);
    next.t = s.t + tau;
    return next;
}

} // namespace hsmdp
