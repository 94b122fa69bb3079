#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <vector>

#include "xprob/event.hpp"
#include "xprob/measure.hpp"
#include "xprob/simplex.hpp"

namespace xprob {

/**
 * A finite betting menu: events paired with quoted prices. For a measure the
 * prices are the measure's event values; elicited lower probabilities and
 * test-only tampered tables quote arbitrary prices.
 */
struct BettingTable {
    std::size_t n_states = 0;
    std::vector<Event> events;
    std::vector<double> prices;
};

/// A bet the bookmaker wins in every state: stakes on bettable events whose
/// payoff f(w) = sum_j s_j [1_Bj(w) - price_j] is strictly negative for all w.
struct DutchBookCandidate {
    std::vector<Event> events;
    std::vector<double> stakes;
    double worst_payoff = 0.0; // max over states of f(w)
};

/**
 * Atoms eligible to generate the bettable family.
 *
 * A state is bettable when it lies in no event of strictly negative value.
 * The cheapest event containing w consists of w plus every negative atom, so
 * the closed form is: a_w >= 0 and a_w >= sum of |negative atoms|. This rule
 * is certified against brute-force enumeration of 2^Omega in the test suite.
 */
inline Event bettable_atoms(const ExtendedMeasure& P) {
    double neg_sum = 0.0;
    for (double a : P.atoms())
        if (a < 0.0)
            neg_sum += -a;
    Event out;
    for (std::size_t i = 0; i < P.size(); ++i) {
        const double a = P.atom(i);
        if (a >= 0.0 && a >= neg_sum)
            out = out.with(i);
    }
    return out;
}

/// All nonempty unions of bettable atoms with at most max_union_size members,
/// in ascending mask order. The menu size is guarded: enumerating unions of a
/// large bettable family must be requested with a smaller max_union_size.
inline std::vector<Event> bettable_events(Event bettable, std::size_t max_union_size,
                                          std::size_t max_menu = 65536) {
    const auto idx = bettable.indices();
    std::vector<Event> out;
    if (max_union_size >= idx.size() && idx.size() > 26)
        throw space_too_large_error("betting menu would enumerate 2^" +
                                    std::to_string(idx.size()) +
                                    " events; lower max_events");
    if (max_union_size >= idx.size()) {
        const std::uint64_t subsets = std::uint64_t{1} << idx.size();
        if (subsets - 1 > max_menu)
            throw space_too_large_error("betting menu of " + std::to_string(subsets - 1) +
                                        " events exceeds the cap; lower max_events");
    }
    // lexicographic union growth, bounded by size and count
    std::vector<std::vector<std::size_t>> frontier;
    for (std::size_t k = 0; k < idx.size(); ++k)
        frontier.push_back({k});
    std::size_t depth = 1;
    std::vector<Event> made;
    while (depth <= max_union_size && !frontier.empty()) {
        for (const auto& combo : frontier) {
            Event e;
            for (std::size_t k : combo)
                e = e.with(idx[k]);
            made.push_back(e);
            if (made.size() > max_menu)
                throw space_too_large_error("betting menu exceeds " +
                                            std::to_string(max_menu) +
                                            " events; lower max_events");
        }
        std::vector<std::vector<std::size_t>> next;
        if (depth < max_union_size) {
            for (const auto& combo : frontier)
                for (std::size_t k = combo.back() + 1; k < idx.size(); ++k) {
                    auto grown = combo;
                    grown.push_back(k);
                    next.push_back(std::move(grown));
                }
        }
        frontier = std::move(next);
        ++depth;
    }
    std::sort(made.begin(), made.end(), [](Event a, Event b) { return a.mask() < b.mask(); });
    return made;
}

struct StakeSearch {
    double optimum = 0.0;        // min over stakes (sum |s| <= 1) of max_w f(w)
    std::vector<double> stakes;  // a minimizer
};

/// Stake conventions. two_sided is the additive-measure notion (real-valued
/// stakes). buy_only restricts to nonnegative stakes, the convention under
/// which a quoted lower price binds: it only ever announces a buying price,
/// so a book may not sell at it.
enum class StakePolicy { two_sided, buy_only };

/**
 * Exact LP for the worst-state payoff over normalized stake vectors.
 *
 *   min_{s, sum|s_j| <= 1}  max_w  sum_j s_j [1_Bj(w) - price_j]
 *
 * s = u - v with u, v >= 0 and the max is -g with g >= 0 (zero stakes give
 * payoff 0 everywhere, so the optimum is never positive). Solved as
 *   max g  s.t.  sum_j (u_j - v_j) [1_Bj(w) - price_j] + g <= 0 for all w,
 *                sum_j (u_j + v_j) <= 1.
 * Under buy_only the v block is dropped.
 */
inline StakeSearch minimize_worst_payoff(const BettingTable& table,
                                         StakePolicy policy = StakePolicy::two_sided) {
    const std::size_t e = table.events.size();
    StakeSearch out;
    out.stakes.assign(e, 0.0);
    if (e == 0)
        return out;

    const bool two_sided = policy == StakePolicy::two_sided;
    const std::size_t stake_cols = two_sided ? 2 * e : e;
    const std::size_t n_cols = stake_cols + 1; // stakes, then g
    const std::size_t n_rows = table.n_states + 1;
    std::vector<std::vector<double>> A(n_rows, std::vector<double>(n_cols, 0.0));
    std::vector<double> b(n_rows, 0.0);
    std::vector<double> c(n_cols, 0.0);

    for (std::size_t w = 0; w < table.n_states; ++w) {
        for (std::size_t j = 0; j < e; ++j) {
            const double gain = (table.events[j].contains(w) ? 1.0 : 0.0) - table.prices[j];
            A[w][j] = gain;
            if (two_sided)
                A[w][e + j] = -gain;
        }
        A[w][stake_cols] = 1.0;
        b[w] = 0.0;
    }
    for (std::size_t j = 0; j < stake_cols; ++j)
        A[table.n_states][j] = 1.0;
    b[table.n_states] = 1.0;
    c[stake_cols] = 1.0;

    const auto res = lp::maximize(A, b, c);
    if (res.status != lp::Status::optimal)
        throw numeric_error("stake LP did not reach an optimum");
    for (std::size_t j = 0; j < e; ++j)
        out.stakes[j] = two_sided ? res.x[j] - res.x[e + j] : res.x[j];
    out.optimum = -res.objective;
    return out;
}

/// Payoff of a stake vector in state w.
inline double book_payoff(const BettingTable& table, const std::vector<double>& stakes,
                          std::size_t w) {
    double f = 0.0;
    for (std::size_t j = 0; j < table.events.size(); ++j)
        f += stakes[j] * ((table.events[j].contains(w) ? 1.0 : 0.0) - table.prices[j]);
    return f;
}

inline double worst_book_payoff(const BettingTable& table, const std::vector<double>& stakes) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t w = 0; w < table.n_states; ++w)
        worst = std::max(worst, book_payoff(table, stakes, w));
    return worst;
}

/**
 * Searches the table for a Dutch book. Returns a candidate only when the LP
 * optimum is strictly below -kCoherenceTol; the candidate keeps the events
 * that carry nonzero stakes and reports the recomputed worst payoff.
 */
inline std::optional<DutchBookCandidate> find_dutch_book(
    const BettingTable& table, StakePolicy policy = StakePolicy::two_sided) {
    if (table.n_states == 0 || table.events.empty())
        return std::nullopt;
    const auto search = minimize_worst_payoff(table, policy);
    if (!(search.optimum < -kCoherenceTol))
        return std::nullopt;

    DutchBookCandidate book;
    BettingTable used;
    used.n_states = table.n_states;
    for (std::size_t j = 0; j < table.events.size(); ++j) {
        if (std::fabs(search.stakes[j]) > kIdentityTol) {
            book.events.push_back(table.events[j]);
            book.stakes.push_back(search.stakes[j]);
            used.events.push_back(table.events[j]);
            used.prices.push_back(table.prices[j]);
        }
    }
    book.worst_payoff = worst_book_payoff(used, book.stakes);
    return book;
}

/// Betting menu generated by a measure: unions of its bettable atoms priced
/// at their event values.
inline BettingTable betting_table(const ExtendedMeasure& P, std::size_t max_union_size) {
    BettingTable table;
    table.n_states = P.size();
    table.events = bettable_events(bettable_atoms(P), max_union_size);
    table.prices.reserve(table.events.size());
    for (Event e : table.events)
        table.prices.push_back(P.eval(e));
    return table;
}

/**
 * Dutch-book search against a valid extended measure. Must return nullopt
 * for every measure passing validation: this call is the executable witness
 * that extended probabilities are coherent.
 */
inline std::optional<DutchBookCandidate> find_dutch_book(const ExtendedMeasure& P,
                                                         std::size_t max_events) {
    if (max_events < 1)
        throw validation_error("find_dutch_book requires max_events >= 1");
    return find_dutch_book(betting_table(P, max_events));
}

} // namespace xprob
