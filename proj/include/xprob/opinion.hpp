#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "xprob/dynamics.hpp"
#include "xprob/measure.hpp"
#include "xprob/split.hpp"

namespace xprob {

/**
 * Credibility weights for the persuasion mixture. Weights above 1 model low
 * credibility (latent states); once a state is discovered the persuader's
 * credibility is restored and its weight drops below 1. Defaults apply per
 * latent/discovered status; explicit (atom, time) overrides win.
 */
struct EpsilonSchedule {
    double latent = 1.5;
    double discovered = 0.8;
    std::map<std::pair<std::size_t, std::size_t>, double> overrides; // (atom, t) -> eps

    double at(std::size_t atom, std::size_t t, bool is_latent) const {
        if (auto it = overrides.find({atom, t}); it != overrides.end())
            return it->second;
        return is_latent ? latent : discovered;
    }

    void check() const {
        if (latent < 0.0 || discovered < 0.0)
            throw validation_error("credibility weights must be nonnegative");
        for (const auto& kv : overrides)
            if (kv.second < 0.0)
                throw validation_error("credibility weights must be nonnegative");
    }
};

struct OpinionConfig {
    ExtendedMeasure persuader;        // regular Q; fixed over time
    ExtendedMeasure persuaded_oracle; // regular oracle behind the persuaded agent's extended belief
    Split split0;
    EpsilonSchedule schedule;
    std::size_t horizon = 1;
    std::uint64_t seed = 0;
    std::optional<std::vector<std::string>> discovery_order; // explicit override

    void check() const {
        if (!persuader.is_regular())
            throw validation_error("the persuading agent's measure must be a regular probability");
        if (!persuaded_oracle.is_regular())
            throw validation_error("the persuaded agent's oracle must be a regular probability");
        if (persuader.space() != persuaded_oracle.space())
            throw validation_error("persuader and persuaded measures must share a state space");
        if (horizon < 1)
            throw validation_error("horizon must be at least 1");
        schedule.check();
    }
};

/**
 * One persuasion step: atomwise mixture eps_k P(w_k) + (1 - eps_k) Q(w_k).
 *
 * The result satisfies the relaxed validity conditions only (atoms in
 * [-1, 1], whole-space total at most 1); the absolute-sum axiom is
 * deliberately not enforced on influenced measures. Violations raise a
 * validation error listing every offending atom.
 */
inline ExtendedMeasure influence_step(const ExtendedMeasure& P, const ExtendedMeasure& Q,
                                      const std::vector<double>& eps) {
    if (P.space() != Q.space())
        throw validation_error("influence_step requires measures over the same state space");
    if (eps.size() != P.size())
        throw validation_error("one credibility weight per atom is required");
    std::vector<double> atoms(P.size());
    double total = 0.0;
    std::string offenders;
    for (std::size_t k = 0; k < P.size(); ++k) {
        atoms[k] = eps[k] * P.atom(k) + (1.0 - eps[k]) * Q.atom(k);
        total += atoms[k];
        if (std::fabs(atoms[k]) > 1.0)
            offenders += (offenders.empty() ? "" : ", ") + std::to_string(k) +
                         " -> " + std::to_string(atoms[k]);
    }
    if (!offenders.empty())
        throw validation_error("influenced atoms outside [-1, 1]: " + offenders);
    if (total > 1.0 + kIdentityTol)
        throw validation_error("influenced whole-space value " + std::to_string(total) +
                               " exceeds 1");
    return ExtendedMeasure::create_relaxed(P.space(), std::move(atoms));
}

/// Schedule-resolved overload: weights come from the (atom, time) schedule
/// and the split's latent/actual status.
inline ExtendedMeasure influence_step(const ExtendedMeasure& P, const OpinionConfig& cfg,
                                      std::size_t t, const Split& split) {
    std::vector<double> eps(P.size());
    for (std::size_t k = 0; k < P.size(); ++k)
        eps[k] = cfg.schedule.at(k, t, !split.is_actual(k));
    return influence_step(P, cfg.persuader, eps);
}

struct BoomerangStep {
    std::size_t t = 0;
    Split split;
    ExtendedMeasure belief;           // the persuaded agent's updated P_t
    ExtendedMeasure influenced;       // the mixture at time t
    std::vector<double> eps;
    std::vector<double> displacement; // influenced - belief, per atom
    double influenced_abs_sum = 0.0;  // recorded residual of the relaxed axiom
};

struct BoomerangTrajectory {
    std::vector<BoomerangStep> steps;
};

/**
 * Alternates persuasion and discovery over the horizon. Each step mixes the
 * agent's updated belief with the persuader's fixed measure, then one latent
 * state (if any remain) is discovered, restoring that atom's credibility for
 * later steps. Discovery order is seeded-uniform over the remaining latent
 * states unless an explicit order is given.
 */
inline BoomerangTrajectory run_boomerang(const OpinionConfig& cfg) {
    cfg.check();
    BoomerangTrajectory traj;
    ExtendedMeasure belief = init_extended(cfg.persuaded_oracle, cfg.split0);
    Split split = cfg.split0;
    std::mt19937_64 rng(cfg.seed);

    for (std::size_t t = 0; t < cfg.horizon; ++t) {
        BoomerangStep step{t, split, belief, belief, {}, {}, 0.0};
        step.eps.resize(belief.size());
        for (std::size_t k = 0; k < belief.size(); ++k)
            step.eps[k] = cfg.schedule.at(k, t, !split.is_actual(k));
        step.influenced = influence_step(belief, cfg.persuader, step.eps);
        step.displacement.resize(belief.size());
        for (std::size_t k = 0; k < belief.size(); ++k) {
            step.displacement[k] = step.influenced.atom(k) - belief.atom(k);
            step.influenced_abs_sum += std::fabs(step.influenced.atom(k));
            // the mixture's algebraic fingerprint, checked on every step
            const double identity =
                (step.eps[k] - 1.0) * (belief.atom(k) - cfg.persuader.atom(k));
            if (std::fabs(step.displacement[k] - identity) > kIdentityTol)
                throw numeric_error("influence displacement identity failed at atom " +
                                    std::to_string(k));
        }
        traj.steps.push_back(std::move(step));

        // Discovery between persuasion rounds.
        const Event latent = split.latent();
        if (latent.empty())
            continue;
        std::string label;
        if (cfg.discovery_order && t < cfg.discovery_order->size()) {
            label = (*cfg.discovery_order)[t];
        } else if (cfg.discovery_order) {
            continue; // explicit order exhausted: no further discoveries
        } else {
            const auto pool = latent.indices();
            label = belief.space().label(pool[detail::uniform_below(rng, pool.size())]);
        }
        auto r = observe(belief, split, label);
        belief = std::move(r.measure);
        split = r.split;
    }
    return traj;
}

} // namespace xprob
