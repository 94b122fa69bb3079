#pragma once

#include <bit>
#include <cstdint>
#include <initializer_list>
#include <vector>

#include "xprob/state_space.hpp"

namespace xprob {

/**
 * A subset of state indices with bitset semantics (F = 2^Omega).
 *
 * An Event is just a mask; it is validated against a concrete space at the
 * point of use. Complements therefore take the space (or its full mask)
 * explicitly.
 */
class Event {
public:
    constexpr Event() = default;
    constexpr explicit Event(std::uint64_t mask) : mask_(mask) {}

    static constexpr Event none() { return Event{}; }
    static constexpr Event single(std::size_t i) { return Event{std::uint64_t{1} << i}; }
    static Event full(const StateSpace& space) { return Event{space.full_mask()}; }

    static Event of(std::initializer_list<std::size_t> indices) {
        std::uint64_t m = 0;
        for (std::size_t i : indices)
            m |= std::uint64_t{1} << i;
        return Event{m};
    }

    constexpr std::uint64_t mask() const noexcept { return mask_; }
    constexpr bool empty() const noexcept { return mask_ == 0; }
    std::size_t count() const noexcept { return static_cast<std::size_t>(std::popcount(mask_)); }
    constexpr bool contains(std::size_t i) const noexcept { return (mask_ >> i) & 1u; }

    constexpr Event operator&(Event o) const noexcept { return Event{mask_ & o.mask_}; }
    constexpr Event operator|(Event o) const noexcept { return Event{mask_ | o.mask_}; }
    constexpr Event operator-(Event o) const noexcept { return Event{mask_ & ~o.mask_}; }
    constexpr Event with(std::size_t i) const noexcept { return Event{mask_ | (std::uint64_t{1} << i)}; }

    Event complement(const StateSpace& space) const { return Event{~mask_ & space.full_mask()}; }

    constexpr bool subset_of(Event o) const noexcept { return (mask_ & ~o.mask_) == 0; }
    constexpr bool disjoint_from(Event o) const noexcept { return (mask_ & o.mask_) == 0; }

    constexpr bool operator==(const Event&) const = default;

    /// Visit set indices in ascending order.
    template <class F>
    void for_each(F&& f) const {
        std::uint64_t m = mask_;
        while (m != 0) {
            const auto i = static_cast<std::size_t>(std::countr_zero(m));
            f(i);
            m &= m - 1;
        }
    }

    std::vector<std::size_t> indices() const {
        std::vector<std::size_t> out;
        out.reserve(count());
        for_each([&](std::size_t i) { out.push_back(i); });
        return out;
    }

private:
    std::uint64_t mask_ = 0;
};

/// Throws invalid_event_error if the event references indices outside the space.
inline void require_valid_event(const StateSpace& space, Event event) {
    if ((event.mask() & ~space.full_mask()) != 0)
        throw invalid_event_error("event references state indices outside the " +
                                  std::to_string(space.size()) + "-state space");
}

} // namespace xprob
