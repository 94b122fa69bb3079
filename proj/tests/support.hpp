#pragma once

// Shared generators and independent brute-force oracles for the test suites.
//
// Random measures are built on a dyadic grid: atom magnitudes are integers
// scaled by 2^-20 whose absolute values sum to exactly 1. Every event value
// is then a small multiple of 2^-20, so sums, differences, and the set
// identities evaluate without any rounding, and "exact" assertions mean
// exact. The oracles below recompute everything from first principles
// (straight subset loops), independent of the library's analytic shortcuts.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "xprob/coherence.hpp"
#include "xprob/event.hpp"
#include "xprob/measure.hpp"
#include "xprob/split.hpp"

namespace testsupport {

using namespace xprob;

inline constexpr std::int64_t kGrid = 1 << 20;

/// n nonnegative integers summing to kGrid (uniform composition via sorted
/// cut points).
inline std::vector<std::int64_t> random_composition(std::mt19937_64& rng, std::size_t n) {
    std::vector<std::int64_t> cuts;
    cuts.reserve(n + 1);
    cuts.push_back(0);
    cuts.push_back(kGrid);
    for (std::size_t i = 0; i + 1 < n; ++i)
        cuts.push_back(static_cast<std::int64_t>(rng() % (kGrid + 1)));
    std::sort(cuts.begin(), cuts.end());
    std::vector<std::int64_t> parts(n);
    for (std::size_t i = 0; i < n; ++i)
        parts[i] = cuts[i + 1] - cuts[i];
    return parts;
}

inline StateSpace numbered_space(std::size_t n) {
    return StateSpace::naturals(static_cast<std::int64_t>(n));
}

/// Valid extended measure with dyadic atoms and random signs.
inline ExtendedMeasure random_valid_measure(std::mt19937_64& rng, std::size_t n) {
    const auto parts = random_composition(rng, n);
    std::vector<double> atoms(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double mag = static_cast<double>(parts[i]) / static_cast<double>(kGrid);
        atoms[i] = (rng() & 1u) ? -mag : mag;
    }
    return ExtendedMeasure::create(numbered_space(n), std::move(atoms));
}

/// Regular probability with dyadic atoms.
inline ExtendedMeasure random_regular_measure(std::mt19937_64& rng, std::size_t n) {
    const auto parts = random_composition(rng, n);
    std::vector<double> atoms(n);
    for (std::size_t i = 0; i < n; ++i)
        atoms[i] = static_cast<double>(parts[i]) / static_cast<double>(kGrid);
    return ExtendedMeasure::create(numbered_space(n), std::move(atoms));
}

/// Valid measure whose signs follow the split: nonnegative on the actual
/// part, nonpositive on the latent part.
inline ExtendedMeasure random_split_measure(std::mt19937_64& rng, const Split& split,
                                            std::size_t n) {
    const auto parts = random_composition(rng, n);
    std::vector<double> atoms(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double mag = static_cast<double>(parts[i]) / static_cast<double>(kGrid);
        atoms[i] = split.is_actual(i) ? mag : -mag;
    }
    return ExtendedMeasure::create(numbered_space(n), std::move(atoms));
}

/// Random nonempty actual part for an n-state space.
inline Event random_nonempty_event(std::mt19937_64& rng, std::size_t n) {
    const std::uint64_t full = (n == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
    for (;;) {
        const std::uint64_t m = rng() & full;
        if (m != 0)
            return Event{m};
    }
}

inline Event random_event(std::mt19937_64& rng, std::size_t n) {
    const std::uint64_t full = (n == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
    return Event{rng() & full};
}

/// First-principles event value: loop the subset's bits, nothing shared with
/// the library's evaluators.
inline double direct_value(const std::vector<double>& atoms, std::uint64_t mask) {
    double s = 0.0;
    for (std::size_t i = 0; i < atoms.size(); ++i)
        if ((mask >> i) & 1u)
            s += atoms[i];
    return s;
}

/// Brute-force extended total variation: max |P(A) - Q(A)| over all 2^N
/// subsets.
inline double brute_force_d_etv(const ExtendedMeasure& P, const ExtendedMeasure& Q) {
    const std::size_t n = P.size();
    double worst = 0.0;
    for (std::uint64_t m = 0; m < (std::uint64_t{1} << n); ++m)
        worst = std::max(worst,
                         std::fabs(direct_value(P.atoms(), m) - direct_value(Q.atoms(), m)));
    return worst;
}

/// Brute-force bettable atoms: enumerate every strictly negative event and
/// exclude the atoms it touches.
inline Event brute_force_bettable(const ExtendedMeasure& P) {
    const std::size_t n = P.size();
    std::uint64_t excluded = 0;
    for (std::uint64_t m = 1; m < (std::uint64_t{1} << n); ++m)
        if (direct_value(P.atoms(), m) < 0.0)
            excluded |= m;
    std::uint64_t full = (std::uint64_t{1} << n) - 1;
    return Event{full & ~excluded};
}

/// Coarse stake-grid search for the most damaging normalized book on a
/// table; an independent lower-resolution check of the stake LP.
inline double grid_search_worst_payoff(const BettingTable& table, int steps_per_axis) {
    const std::size_t e = table.events.size();
    std::vector<int> grid(e, -steps_per_axis);
    double best = 0.0; // zero stakes achieve payoff 0
    for (;;) {
        std::vector<double> stakes(e);
        double norm = 0.0;
        for (std::size_t j = 0; j < e; ++j) {
            stakes[j] = static_cast<double>(grid[j]) / steps_per_axis;
            norm += std::fabs(stakes[j]);
        }
        if (norm > 0.0) {
            for (double& s : stakes)
                s /= norm; // project onto sum |s| = 1
            best = std::min(best, worst_book_payoff(table, stakes));
        }
        std::size_t k = 0;
        while (k < e && grid[k] == steps_per_axis) {
            grid[k] = -steps_per_axis;
            ++k;
        }
        if (k == e)
            break;
        ++grid[k];
    }
    return best;
}

} // namespace testsupport
