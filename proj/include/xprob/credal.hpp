#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "xprob/dynamics.hpp"
#include "xprob/event.hpp"
#include "xprob/measure.hpp"
#include "xprob/split.hpp"

namespace xprob {

/**
 * A finite set of extended measures sharing one state space and one split
 * (the sensitivity-analysis object). Members must respect the split's sign
 * conditions: nonnegative atoms on the actual part, nonpositive on the
 * latent part.
 */
class CredalSet {
public:
    CredalSet(std::vector<ExtendedMeasure> members, Split split)
        : members_(std::move(members)), split_(std::move(split)) {
        if (members_.empty())
            throw validation_error("a credal set needs at least one member");
        const StateSpace& space = members_.front().space();
        if (Event::full(space) != split_.full())
            throw validation_error("credal split is over a different state space");
        for (const auto& m : members_) {
            if (m.space() != space)
                throw validation_error("credal members must share one state space");
            if (m.relaxed())
                throw validation_error("credal members must be strictly valid measures");
            for (std::size_t i = 0; i < m.size(); ++i) {
                if (split_.is_actual(i) ? (m.atom(i) < 0.0) : (m.atom(i) > 0.0))
                    throw validation_error("member atom " + std::to_string(i) +
                                           " violates the split sign conditions");
            }
        }
    }

    const std::vector<ExtendedMeasure>& members() const noexcept { return members_; }
    const Split& split() const noexcept { return split_; }
    const StateSpace& space() const noexcept { return members_.front().space(); }
    std::size_t size() const noexcept { return members_.size(); }

    double lower(Event A) const {
        double v = members_.front().eval(A);
        for (std::size_t k = 1; k < members_.size(); ++k)
            v = std::min(v, members_[k].eval(A));
        return v;
    }

    double upper(Event A) const {
        double v = members_.front().eval(A);
        for (std::size_t k = 1; k < members_.size(); ++k)
            v = std::max(v, members_[k].eval(A));
        return v;
    }

    /// Member-wise discovery step under a shared observation.
    CredalSet observe_all(const std::string& label) const {
        std::vector<ExtendedMeasure> next;
        next.reserve(members_.size());
        Split next_split = split_;
        for (const auto& m : members_) {
            auto r = observe(m, split_, label);
            next.push_back(std::move(r.measure));
            next_split = r.split;
        }
        return CredalSet(std::move(next), next_split);
    }

private:
    std::vector<ExtendedMeasure> members_;
    Split split_;
};

/// Directed-Hausdorff distance between two credal sets in the d_etv metric,
/// exact over the finite member lists.
inline double hausdorff(const CredalSet& a, const CredalSet& b) {
    if (a.space() != b.space())
        throw validation_error("hausdorff requires credal sets over the same state space");
    const auto directed = [](const CredalSet& from, const CredalSet& to) {
        double worst = 0.0;
        for (const auto& p : from.members()) {
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : to.members())
                best = std::min(best, d_etv(p, q));
            worst = std::max(worst, best);
        }
        return worst;
    };
    return std::max(directed(a, b), directed(b, a));
}

/// One elicited event bound; unspecified events fall back to the vacuous
/// bounds [-1, 1] (and the empty event to 0, its value under every measure).
struct ElicitedBound {
    Event event;
    double lower = -1.0;
    double upper = 1.0;
};

/**
 * Lower/upper bound functionals on events: either derived on demand from a
 * credal set, or elicited directly as a full 2^N table (N <= 16).
 */
class Envelope {
public:
    enum class Source { derived, elicited };

    static constexpr std::size_t max_elicited_states = 16;

    static Envelope derive(CredalSet set) { return Envelope(std::move(set)); }

    static Envelope elicit(StateSpace space, std::span<const ElicitedBound> bounds) {
        if (space.size() > max_elicited_states)
            throw space_too_large_error("elicited envelopes store a full event table; capped at " +
                                        std::to_string(max_elicited_states) + " states");
        Elicited table;
        table.space = std::move(space);
        const std::size_t n_events = std::size_t{1} << table.space.size();
        table.lower.assign(n_events, -1.0);
        table.upper.assign(n_events, 1.0);
        table.lower[0] = table.upper[0] = 0.0;
        for (const auto& b : bounds) {
            require_valid_event(table.space, b.event);
            if (b.lower > b.upper)
                throw validation_error("elicited bound has lower > upper");
            table.lower[b.event.mask()] = b.lower;
            table.upper[b.event.mask()] = b.upper;
            table.specified.push_back(b.event);
        }
        return Envelope(std::move(table));
    }

    Source source() const noexcept {
        return std::holds_alternative<CredalSet>(data_) ? Source::derived : Source::elicited;
    }

    const StateSpace& space() const {
        if (const auto* set = std::get_if<CredalSet>(&data_))
            return set->space();
        return std::get<Elicited>(data_).space;
    }

    std::size_t n_states() const { return space().size(); }

    const CredalSet* generating_set() const { return std::get_if<CredalSet>(&data_); }

    /// Events that were explicitly priced (elicited envelopes only; a derived
    /// envelope prices every event).
    std::vector<Event> specified_events() const {
        if (const auto* t = std::get_if<Elicited>(&data_))
            return t->specified;
        return {};
    }

    double lower(Event A) const {
        if (const auto* set = std::get_if<CredalSet>(&data_))
            return set->lower(A);
        const auto& t = std::get<Elicited>(data_);
        require_valid_event(t.space, A);
        return t.lower[A.mask()];
    }

    double upper(Event A) const {
        if (const auto* set = std::get_if<CredalSet>(&data_))
            return set->upper(A);
        const auto& t = std::get<Elicited>(data_);
        require_valid_event(t.space, A);
        return t.upper[A.mask()];
    }

    /// Full 2^N lower table (mask-indexed). Enumeration-guarded by the caller.
    std::vector<double> lower_table() const {
        if (const auto* set = std::get_if<CredalSet>(&data_)) {
            auto table = event_value_table(set->members().front().atoms());
            for (std::size_t k = 1; k < set->members().size(); ++k) {
                const auto other = event_value_table(set->members()[k].atoms());
                for (std::size_t m = 0; m < table.size(); ++m)
                    table[m] = std::min(table[m], other[m]);
            }
            return table;
        }
        return std::get<Elicited>(data_).lower;
    }

    std::vector<double> upper_table() const {
        if (const auto* set = std::get_if<CredalSet>(&data_)) {
            auto table = event_value_table(set->members().front().atoms());
            for (std::size_t k = 1; k < set->members().size(); ++k) {
                const auto other = event_value_table(set->members()[k].atoms());
                for (std::size_t m = 0; m < table.size(); ++m)
                    table[m] = std::max(table[m], other[m]);
            }
            return table;
        }
        return std::get<Elicited>(data_).upper;
    }

private:
    struct Elicited {
        StateSpace space{std::vector<std::string>{"_"}};
        std::vector<double> lower, upper;
        std::vector<Event> specified;
    };

    explicit Envelope(CredalSet set) : data_(std::move(set)) {}
    explicit Envelope(Elicited table) : data_(std::move(table)) {}

    std::variant<CredalSet, Elicited> data_;
};

/**
 * Capacity-law audit of an envelope: the null-empty condition, the [-1,1]
 * range, and the sign-guarded monotonicity, each on both functionals, over
 * the full event enumeration. Derived envelopes are additionally held to
 * superadditivity/subadditivity on all disjoint pairs and to the conjugacy
 * identity; on elicited envelopes those checks only raise flags (a
 * superadditivity violation on bettable events is a coherence
 * counterexample, not a shape error).
 */
inline ValidationReport validate_capacity(const Envelope& env, std::size_t n_cap = 10) {
    const std::size_t n = env.n_states();
    if (n > n_cap)
        throw space_too_large_error("capacity validation enumerates 3^N pairs; capped at " +
                                    std::to_string(n_cap) + " states");
    const bool derived = env.source() == Envelope::Source::derived;
    const auto lower = env.lower_table();
    const auto upper = env.upper_table();
    const std::uint64_t full = (n == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);

    ValidationReport rep;
    const auto add = [&rep](std::string name, double residual, bool pass, std::string note = "") {
        rep.checks.push_back(AxiomCheck{std::move(name), pass, residual, std::move(note)});
    };

    add("EC1 null empty (lower)", std::fabs(lower[0]), std::fabs(lower[0]) <= kIdentityTol);
    add("EC1 null empty (upper)", std::fabs(upper[0]), std::fabs(upper[0]) <= kIdentityTol);

    const auto range_residual = [&](const std::vector<double>& t) {
        double worst = 0.0;
        for (double v : t)
            worst = std::max(worst, std::fabs(v) - 1.0);
        return std::max(worst, 0.0);
    };
    const double r_lo = range_residual(lower), r_up = range_residual(upper);
    add("EC2 range (lower)", r_lo, r_lo <= 0.0);
    add("EC2 range (upper)", r_up, r_up <= 0.0);

    // EC3 over all nested pairs A subset B, guard signs as stated.
    const auto ec3_residual = [&](const std::vector<double>& t) {
        double worst = 0.0;
        for (std::uint64_t bm = 0; bm <= full; ++bm) {
            for (std::uint64_t am = (bm - 1) & bm;; am = (am - 1) & bm) {
                const double va = t[am], vb = t[bm], vdiff = t[bm & ~am];
                if (va >= 0.0 && vb >= 0.0 && vdiff >= 0.0)
                    worst = std::max(worst, va - vb);
                if (va <= 0.0 && vb <= 0.0 && vdiff <= 0.0)
                    worst = std::max(worst, vb - va);
                if (am == 0)
                    break;
            }
            if (bm == full)
                break;
        }
        return worst;
    };
    const double m_lo = ec3_residual(lower), m_up = ec3_residual(upper);
    add("EC3 monotone (lower)", m_lo, m_lo <= kIdentityTol);
    add("EC3 monotone (upper)", m_up, m_up <= kIdentityTol);

    // Superadditivity of the lower / subadditivity of the upper functional
    // on all disjoint pairs.
    double super = 0.0, sub = 0.0;
    for (std::uint64_t am = 0; am <= full; ++am) {
        const std::uint64_t rest = full & ~am;
        for (std::uint64_t bm = rest;; bm = (bm - 1) & rest) {
            super = std::max(super, lower[am] + lower[bm] - lower[am | bm]);
            sub = std::max(sub, upper[am | bm] - upper[am] - upper[bm]);
            if (bm == 0)
                break;
        }
        if (am == full)
            break;
    }
    add("superadditivity (lower)", super, super <= kIdentityTol,
        derived ? "" : "flag: a violation on bettable events defeats coherence");
    add("subadditivity (upper)", sub, sub <= kIdentityTol,
        derived ? "" : "flag only (elicited)");

    // Conjugacy. For a derived envelope the exact identity is the
    // member-aligned complement form; elicited envelopes are only held to
    // the implied inequality, and violations are flagged, not repaired.
    if (derived) {
        const auto& members = env.generating_set()->members();
        double worst = 0.0;
        for (std::uint64_t am = 0; am <= full; ++am) {
            double via_complement = -std::numeric_limits<double>::infinity();
            for (const auto& p : members)
                via_complement = std::max(via_complement,
                                          p.total() - p.eval(Event{full & ~am}));
            worst = std::max(worst, std::fabs(upper[am] - via_complement));
            if (am == full)
                break;
        }
        add("conjugacy (derived)", worst, worst <= kIdentityTol);
    } else {
        double worst = 0.0;
        for (std::uint64_t am = 0; am <= full; ++am) {
            worst = std::max(worst, upper[am] - (upper[full] - lower[full & ~am]));
            if (am == full)
                break;
        }
        worst = std::max(worst, 0.0);
        add("conjugacy bound (elicited)", worst, worst <= kIdentityTol, "flag only");
    }

    rep.pass = true;
    for (const auto& c : rep.checks) {
        const bool hard = derived || c.name.rfind("EC", 0) == 0;
        if (hard)
            rep.pass = rep.pass && c.pass;
    }
    return rep;
}

/// Extended geometric rule: ratio of lower values. Conditioning on a
/// singleton of the finest partition yields exactly 1 or 0.
inline double geometric_conditional(const Envelope& env, Event A, Event B) {
    const double pb = env.lower(B);
    if (std::fabs(pb) <= kIdentityTol)
        throw conditioning_on_null_error("geometric rule: conditioning event has lower value 0");
    return env.lower(A & B) / pb;
}

inline double geometric_conditional(const CredalSet& set, Event A, Event B) {
    return geometric_conditional(Envelope::derive(set), A, B);
}

/// Per-atom lower/upper bounds (the singleton restriction of an envelope).
struct SingletonBounds {
    std::vector<double> lower, upper;
};

inline SingletonBounds singleton_bounds(const CredalSet& set) {
    SingletonBounds b;
    const std::size_t n = set.space().size();
    b.lower.reserve(n);
    b.upper.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        b.lower.push_back(set.lower(Event::single(i)));
        b.upper.push_back(set.upper(Event::single(i)));
    }
    return b;
}

struct EnvelopeUpdate {
    SingletonBounds bounds;
    Split split;
};

/**
 * Sublinear counterpart of the sign-flip update, on singleton bounds: a
 * discovered state's bounds swap magnitudes (the new lower is the old
 * upper's absolute value and vice versa); re-drawing an actual state changes
 * nothing. Other singletons are held constant; the split time advances.
 */
inline EnvelopeUpdate update_envelope(const SingletonBounds& bounds, const Split& split,
                                      std::size_t w) {
    if (bounds.lower.size() != bounds.upper.size())
        throw validation_error("singleton bound vectors differ in length");
    if (w >= bounds.lower.size())
        throw invalid_event_error("updated state index out of range");
    if (split.is_actual(w))
        return {bounds, split.advanced(split.actual())};
    SingletonBounds next = bounds;
    next.lower[w] = std::fabs(bounds.upper[w]);
    next.upper[w] = std::fabs(bounds.lower[w]);
    return {std::move(next), split.advanced(split.actual().with(w))};
}

/**
 * Certified additive bounds from singleton envelope values: the sum of
 * singleton lowers bounds the lower value from below (superadditivity), and
 * the sum of singleton uppers bounds the upper value from above.
 */
inline std::pair<double, double> event_bounds(const CredalSet& set, Event A) {
    require_valid_event(set.space(), A);
    double lo = 0.0, up = 0.0;
    A.for_each([&](std::size_t i) {
        lo += set.lower(Event::single(i));
        up += set.upper(Event::single(i));
    });
    if (lo > set.lower(A) + kIdentityTol || set.upper(A) > up + kIdentityTol)
        throw numeric_error("additive envelope bounds failed their certification");
    return {lo, up};
}

/// Credal-set overload for the critical-event enumeration.
inline std::vector<Event> critical_events(const CredalSet& set, std::size_t n_cap = 16) {
    return critical_events(std::span<const ExtendedMeasure>(set.members()), set.split(), n_cap);
}

} // namespace xprob
