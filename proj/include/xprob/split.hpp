#pragma once

#include <cstddef>

#include "xprob/event.hpp"
#include "xprob/state_space.hpp"

namespace xprob {

/**
 * Time-indexed partition of the space into the actual (observed) part and
 * the latent (not yet observed) part. The two parts are complementary by
 * construction. Along a trajectory the actual part only grows; advanced()
 * enforces that.
 */
class Split {
public:
    Split(std::size_t time, Event actual, const StateSpace& space)
        : time_(time), actual_(actual), full_(Event::full(space)) {
        require_valid_event(space, actual);
    }

    /// t = 0 split; the actual part must be nonempty.
    static Split initial(Event actual0, const StateSpace& space) {
        if (actual0.empty())
            throw validation_error("the actual part must be nonempty at t = 0");
        return Split(0, actual0, space);
    }

    std::size_t time() const noexcept { return time_; }
    Event actual() const noexcept { return actual_; }
    Event latent() const noexcept { return full_ - actual_; }
    Event full() const noexcept { return full_; }

    bool is_actual(std::size_t i) const noexcept { return actual_.contains(i); }
    bool fully_discovered() const noexcept { return actual_ == full_; }

    /// Next-step split. The actual part may only grow.
    Split advanced(Event new_actual) const {
        if (!actual_.subset_of(new_actual))
            throw validation_error("the actual part of a split is nondecreasing in time");
        if ((new_actual.mask() & ~full_.mask()) != 0)
            throw invalid_event_error("split actual part leaves the state space");
        Split next = *this;
        next.time_ = time_ + 1;
        next.actual_ = new_actual;
        return next;
    }

    bool operator==(const Split&) const = default;

private:
    std::size_t time_;
    Event actual_;
    Event full_;
};

} // namespace xprob
