#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "xprob/credal.hpp"
#include "xprob/dynamics.hpp"
#include "xprob/measure.hpp"

namespace xprob {

/**
 * Geometric prior truncated to {1..N} and renormalized. The discarded tail
 * mass (1-p)^N is reported alongside so the truncation stays documented.
 */
inline std::pair<ExtendedMeasure, double> truncated_geometric(const StateSpace& space, double p) {
    if (!(p > 0.0 && p < 1.0))
        throw validation_error("geometric parameter must lie in (0, 1)");
    const std::size_t n = space.size();
    std::vector<double> atoms(n, 0.0);
    double mass = 0.0;
    double term = p; // p (1-p)^{k-1}
    for (std::size_t k = 0; k < n; ++k) {
        atoms[k] = term;
        mass += term;
        term *= (1.0 - p);
    }
    for (double& a : atoms)
        a /= mass;
    // tail via the closed form; 1 - mass cancels catastrophically
    return {ExtendedMeasure::create(space, std::move(atoms)),
            std::pow(1.0 - p, static_cast<double>(n))};
}

/// Species-sampling run: a credal family of truncated geometric priors on a
/// truncation of the naturals, an initial actual part {1..n_prior}, and a
/// hidden true space {1..true_m}.
struct SpeciesConfig {
    std::int64_t n_prior = 1;         // ex ante species count: actual part {1..n}
    std::int64_t n_max = 1;           // truncation of the naturals
    std::vector<double> prior_family; // geometric parameters
    std::int64_t true_m = 1;          // hidden true space {1..m}
    std::uint64_t seed = 0;
    bool replacement = false;
    std::optional<std::vector<std::string>> schedule; // explicit observation stream
    std::size_t max_steps = 0;                        // 0: until the stream ends
    std::vector<Event> conditioning_events;

    void check() const {
        if (!(1 <= n_prior && n_prior <= true_m && true_m <= n_max))
            throw validation_error("species config requires 1 <= n_prior <= true_m <= n_max");
        if (prior_family.empty())
            throw validation_error("species config needs at least one prior parameter");
        for (double p : prior_family)
            if (!(p > 0.0 && p < 1.0))
                throw validation_error("prior parameters must lie in (0, 1)");
    }
};

struct IntervalRow {
    Event conditioning;
    std::size_t atom = 0;
    double lower = 0.0;
    double upper = 0.0;
    std::size_t members_used = 0;
};

/// Per-atom posterior bounds, one row per (conditioning event, atom in it).
struct IntervalTable {
    std::vector<IntervalRow> rows;
};

struct SpeciesResult {
    StateSpace space{std::vector<std::string>{"_"}};
    std::vector<Trajectory> trajectories;      // one per prior, sharing the observation stream
    std::vector<ExtendedMeasure> induced;      // ratio-preserving regular measures at T
    IntervalTable intervals;
    std::vector<double> tail_mass;             // truncation loss per prior
    std::vector<std::string> warnings;
};

/**
 * End-to-end species pipeline: seed extended priors from the truncated
 * geometric family, discover the true space through the shared observation
 * stream, renormalize onto the discovered part, and condition each induced
 * measure on each requested event by the regular Bayes rule. Members that
 * give a conditioning event probability zero are dropped from that event's
 * interval with a warning.
 */
inline SpeciesResult run_species(const SpeciesConfig& cfg) {
    cfg.check();
    SpeciesResult out;
    out.space = StateSpace::naturals(cfg.n_max);
    const auto& space = out.space;

    Event actual0, true_space;
    for (std::int64_t k = 0; k < cfg.n_prior; ++k)
        actual0 = actual0.with(static_cast<std::size_t>(k));
    for (std::int64_t k = 0; k < cfg.true_m; ++k)
        true_space = true_space.with(static_cast<std::size_t>(k));
    const Split split0 = Split::initial(actual0, space);

    // One shared observation stream drives every member.
    DiscoveryProcess process;
    process.true_space = true_space;
    process.replacement = cfg.replacement;
    process.rng_seed = cfg.seed;
    process.schedule = cfg.schedule;
    const std::size_t default_cap =
        16 + 8 * static_cast<std::size_t>(cfg.true_m) * (cfg.replacement ? 8 : 1);
    const std::size_t max_steps = cfg.max_steps > 0 ? cfg.max_steps : default_cap;

    std::vector<ExtendedMeasure> oracles;
    for (double p : cfg.prior_family) {
        auto [oracle, tail] = truncated_geometric(space, p);
        out.tail_mass.push_back(tail);
        oracles.push_back(std::move(oracle));
    }

    // Run the first member to fix the stream, then replay it for the rest so
    // every member sees identical observations.
    out.trajectories.push_back(run_discovery(oracles.front(), split0, process, max_steps));
    const auto& stream = out.trajectories.front().observed;
    DiscoveryProcess replay = process;
    replay.schedule = stream;
    for (std::size_t k = 1; k < oracles.size(); ++k)
        out.trajectories.push_back(run_discovery(oracles[k], split0, replay, max_steps));

    const Split final_split = out.trajectories.front().final_split();
    for (const auto& traj : out.trajectories)
        out.induced.push_back(induced_regular(traj.final_measure(), final_split.actual()));

    for (Event B : cfg.conditioning_events) {
        require_valid_event(space, B);
        std::vector<const ExtendedMeasure*> usable;
        for (std::size_t k = 0; k < out.induced.size(); ++k) {
            if (out.induced[k].eval(B) > kIdentityTol) {
                usable.push_back(&out.induced[k]);
            } else {
                out.warnings.push_back("prior p=" + std::to_string(cfg.prior_family[k]) +
                                       " gives the conditioning event probability 0; dropped");
            }
        }
        if (usable.empty()) {
            out.warnings.push_back("conditioning event has probability 0 under every member");
            continue;
        }
        B.for_each([&](std::size_t atom) {
            IntervalRow row;
            row.conditioning = B;
            row.atom = atom;
            row.members_used = usable.size();
            double lo = 1.0, up = 0.0;
            for (const auto* m : usable) {
                const double post = m->eval(Event::single(atom) & B) / m->eval(B);
                lo = std::min(lo, post);
                up = std::max(up, post);
            }
            row.lower = lo;
            row.upper = up;
            out.intervals.rows.push_back(row);
        });
    }
    return out;
}

} // namespace xprob
