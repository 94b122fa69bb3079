#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "xprob/event.hpp"
#include "xprob/measure.hpp"
#include "xprob/split.hpp"

namespace xprob {

/**
 * Initial extended measure from an oracle probability: the oracle's values
 * on the actual part, their negations on the latent part. The absolute-sum
 * axiom transfers directly from the oracle's normalization.
 */
inline ExtendedMeasure init_extended(const ExtendedMeasure& oracle, const Split& split) {
    if (!oracle.is_regular())
        throw validation_error("the oracle must be a regular probability measure "
                               "(nonnegative atoms summing to 1)");
    if (Event::full(oracle.space()) != split.full())
        throw validation_error("oracle and split are over different state spaces");
    std::vector<double> atoms = oracle.atoms();
    split.latent().for_each([&](std::size_t i) { atoms[i] = -atoms[i]; });
    return ExtendedMeasure::create(oracle.space(), std::move(atoms));
}

struct ObserveResult {
    ExtendedMeasure measure;
    Split split;
    bool flipped = false; // true when the observation was a fresh discovery
};

/**
 * One discovery step at state index w: a latent atom flips to its absolute
 * value and moves to the actual part; an already-actual atom leaves the
 * measure unchanged (it flips the first time and then stays constant). The
 * split time advances either way.
 */
inline ObserveResult observe_index(const ExtendedMeasure& P, const Split& split, std::size_t w) {
    if (w >= P.size())
        throw invalid_event_error("observed state index out of range");
    if (split.is_actual(w))
        return {P, split.advanced(split.actual()), false};
    std::vector<double> atoms = P.atoms();
    atoms[w] = std::fabs(atoms[w]);
    return {ExtendedMeasure::create(P.space(), std::move(atoms)),
            split.advanced(split.actual().with(w)), true};
}

/// Label-based observe. A label outside the space raises restart_required
/// carrying the foreign observation; the caller decides how to rebuild a
/// richer space.
inline ObserveResult observe(const ExtendedMeasure& P, const Split& split,
                             const std::string& label) {
    const auto idx = P.space().index_of(label);
    if (!idx)
        throw restart_required(label);
    return observe_index(P, split, *idx);
}

/**
 * Event value via the two-sum decomposition over the nonzero singletons of
 * the actual and latent partitions. Agrees with eval by additivity; it
 * exists as an executable cross-check of that identity.
 */
inline double eval_by_partition(const ExtendedMeasure& P, const Split& split, Event A) {
    require_valid_event(P.space(), A);
    double actual_part = 0.0;
    (A & split.actual()).for_each([&](std::size_t i) {
        if (P.atom(i) != 0.0)
            actual_part += P.atom(i); // conditional value is 1 on its own singleton
    });
    double latent_part = 0.0;
    (A & split.latent()).for_each([&](std::size_t i) {
        if (P.atom(i) != 0.0)
            latent_part += P.atom(i);
    });
    return actual_part + latent_part;
}

/**
 * Extended total variation distance sup_A |P(A) - Q(A)|, computed from the
 * atomwise differences: the supremum is attained either on the positive or
 * on the negative part of the difference. Certified against brute-force
 * subset enumeration in the test suite.
 */
inline double d_etv(const ExtendedMeasure& P, const ExtendedMeasure& Q) {
    if (P.space() != Q.space())
        throw validation_error("d_etv requires measures over the same state space");
    double pos = 0.0, neg = 0.0;
    for (std::size_t i = 0; i < P.size(); ++i) {
        const double d = P.atom(i) - Q.atom(i);
        if (d > 0.0)
            pos += d;
        else
            neg += -d;
    }
    return std::max(pos, neg);
}

/**
 * Events whose latent part exactly offsets their actual part, for every
 * member of the family; such events carry extended probability 0. Full
 * enumeration of 2^Omega, guarded by n_cap.
 */
inline std::vector<Event> critical_events(std::span<const ExtendedMeasure> members,
                                          const Split& split, std::size_t n_cap = 16) {
    if (members.empty())
        throw validation_error("critical_events requires at least one measure");
    const std::size_t n = members.front().size();
    if (n > n_cap)
        throw space_too_large_error("critical-event enumeration capped at " +
                                    std::to_string(n_cap) + " states");
    std::vector<Event> out;
    const std::uint64_t full = members.front().space().full_mask();
    for (std::uint64_t m = 0;; ++m) {
        const Event A{m};
        bool critical = true;
        for (const auto& P : members) {
            const double lat = P.eval(A & split.latent());
            const double act = P.eval(A & split.actual());
            if (std::fabs(lat + act) > kIdentityTol) {
                critical = false;
                break;
            }
        }
        if (critical)
            out.push_back(A);
        if (m == full)
            break;
    }
    return out;
}

/**
 * Ratio-preserving regular measure on the discovered part: atoms scaled by
 * c = 1 / P(discovered) inside, zero outside. Requires a strictly positive
 * normalizer, nonnegative atoms inside and nonpositive atoms outside.
 */
inline ExtendedMeasure induced_regular(const ExtendedMeasure& P, Event discovered) {
    require_valid_event(P.space(), discovered);
    const double normalizer = P.eval(discovered);
    if (!(normalizer > kIdentityTol))
        throw validation_error("induced_regular requires a strictly positive normalizer, got " +
                               std::to_string(normalizer));
    for (std::size_t i = 0; i < P.size(); ++i) {
        if (discovered.contains(i) && P.atom(i) < 0.0)
            throw validation_error("negative atom inside the discovered part");
        if (!discovered.contains(i) && P.atom(i) > 0.0)
            throw validation_error("positive atom outside the discovered part");
    }
    std::vector<double> atoms(P.size(), 0.0);
    const double c = 1.0 / normalizer;
    discovered.for_each([&](std::size_t i) { atoms[i] = c * P.atom(i); });
    return ExtendedMeasure::create(P.space(), std::move(atoms));
}

/// How the discovery process draws states. The urn hides the true sample
/// space from the updating logic; only the simulator reads it.
struct DiscoveryProcess {
    Event true_space;      // hidden true sample space
    bool replacement = false;
    std::uint64_t rng_seed = 0;
    std::optional<std::vector<std::string>> schedule; // explicit observations, overrides the urn
};

enum class Scenario { full_space, proper_subset, undecided };

inline const char* to_string(Scenario s) {
    switch (s) {
    case Scenario::full_space: return "full_space";
    case Scenario::proper_subset: return "proper_subset";
    default: return "undecided";
    }
}

/**
 * Record of a discovery run. splits[t] and measures[t] are aligned;
 * observed[t-1] / flipped[t-1] describe the step into time t. The limit
 * measure is a simulator-side diagnostic built from the oracle and the
 * hidden true space; d_etv_to_limit tracks the distance to it.
 */
struct Trajectory {
    std::vector<Split> splits;
    std::vector<ExtendedMeasure> measures;
    std::vector<std::string> observed;
    std::vector<bool> flipped;
    std::vector<double> d_etv_to_limit;
    std::optional<std::size_t> discovery_time;
    Scenario scenario = Scenario::undecided;
    bool ground_truth_detection = false; // proper_subset declared from the hidden urn contents
    std::optional<ExtendedMeasure> limit;

    std::size_t steps() const { return observed.size(); }
    const ExtendedMeasure& final_measure() const { return measures.back(); }
    const Split& final_split() const { return splits.back(); }
};

namespace detail {

/// Deterministic bounded draw on top of the seeded engine (the engine's
/// output sequence is fully specified, and we avoid the library-defined
/// distribution adaptors so runs are reproducible everywhere).
inline std::size_t uniform_below(std::mt19937_64& rng, std::size_t n) {
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % n);
    for (;;) {
        const std::uint64_t v = rng();
        if (v < limit)
            return static_cast<std::size_t>(v % n);
    }
}

} // namespace detail

/**
 * Simulates the discovery dynamics from an oracle and an initial split.
 *
 * Without replacement the urn holds the not-yet-discovered part of the true
 * space, so every draw is a fresh discovery and the urn empties in exactly
 * |true_space minus actual_0| steps. With replacement every draw is uniform
 * over the whole true space and re-draws leave the measure unchanged. An
 * explicit schedule replays the given observations instead (foreign labels
 * raise restart_required).
 */
inline Trajectory run_discovery(const ExtendedMeasure& oracle, const Split& split0,
                                const DiscoveryProcess& process, std::size_t max_steps) {
    if (max_steps < 1)
        throw validation_error("run_discovery requires max_steps >= 1");
    require_valid_event(oracle.space(), process.true_space);
    if (process.true_space.empty())
        throw validation_error("the true sample space must be nonempty");

    Trajectory traj;
    traj.measures.push_back(init_extended(oracle, split0));
    traj.splits.push_back(split0);

    // Limit object: the oracle's values on everything that is ever actual,
    // negated on the part that never leaves the latent space.
    {
        const Event limit_actual = split0.actual() | process.true_space;
        std::vector<double> atoms = oracle.atoms();
        (Event::full(oracle.space()) - limit_actual).for_each([&](std::size_t i) {
            atoms[i] = -atoms[i];
        });
        traj.limit = ExtendedMeasure::create(oracle.space(), std::move(atoms));
    }
    traj.d_etv_to_limit.push_back(d_etv(traj.measures.back(), *traj.limit));

    std::mt19937_64 rng(process.rng_seed);
    const auto finished = [&](const Split& s) {
        return process.true_space.subset_of(s.actual());
    };

    const auto record_detection = [&](const Split& s) {
        if (!traj.discovery_time && finished(s)) {
            traj.discovery_time = s.time();
            traj.scenario = s.fully_discovered() ? Scenario::full_space
                                                 : Scenario::proper_subset;
            traj.ground_truth_detection =
                traj.scenario == Scenario::proper_subset && process.replacement;
        }
    };
    record_detection(split0);

    for (std::size_t step = 0; step < max_steps; ++step) {
        std::string label;
        if (process.schedule) {
            if (step >= process.schedule->size())
                break;
            label = (*process.schedule)[step];
        } else {
            const Split& cur = traj.splits.back();
            if (!process.replacement) {
                const Event undiscovered = process.true_space - cur.actual();
                if (undiscovered.empty())
                    break;
                const auto pool = undiscovered.indices();
                label = oracle.space().label(pool[detail::uniform_below(rng, pool.size())]);
            } else {
                if (finished(cur))
                    break;
                const auto pool = process.true_space.indices();
                label = oracle.space().label(pool[detail::uniform_below(rng, pool.size())]);
            }
        }
        auto r = observe(traj.measures.back(), traj.splits.back(), label);
        traj.measures.push_back(std::move(r.measure));
        traj.splits.push_back(r.split);
        traj.observed.push_back(label);
        traj.flipped.push_back(r.flipped);
        traj.d_etv_to_limit.push_back(d_etv(traj.measures.back(), *traj.limit));
        record_detection(traj.splits.back());
    }
    return traj;
}

} // namespace xprob
