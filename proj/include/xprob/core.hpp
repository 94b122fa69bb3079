#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "xprob/coherence.hpp"
#include "xprob/credal.hpp"
#include "xprob/measure.hpp"
#include "xprob/simplex.hpp"

namespace xprob {

struct CoreReport {
    bool nonempty = false;
    std::optional<ExtendedMeasure> witness;
    bool coherent = false;
    std::string certificate; // "witness" | "dutch_book" | "stake_lp_clean"
    std::optional<DutchBookCandidate> dutch_book;
    std::vector<double> witness_slack; // eval(A) - lower(A) per event mask
    std::size_t patterns_tried = 0;
};

/// Membership test against a lower envelope: dominates on every event and
/// matches the whole-space value.
inline bool core_contains(const Envelope& env, const ExtendedMeasure& P,
                          double tol = kIdentityTol) {
    if (P.space() != env.space())
        throw validation_error("core membership requires matching state spaces");
    const auto lower = env.lower_table();
    const auto values = event_value_table(P.atoms());
    const std::uint64_t full = P.space().full_mask();
    for (std::uint64_t m = 0; m <= full; ++m) {
        if (values[m] < lower[m] - tol)
            return false;
        if (m == full)
            break;
    }
    return std::fabs(values[full] - lower[full]) <= tol;
}

namespace detail {

/// Bettable atoms read off a lower-value table: a state is bettable when no
/// event of strictly negative lower value contains it.
inline Event bettable_atoms_of_table(const std::vector<double>& lower, std::size_t n) {
    std::uint64_t excluded = 0;
    const std::uint64_t full = (n == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
    for (std::uint64_t m = 1; m <= full; ++m) {
        if (lower[m] < 0.0)
            excluded |= m;
        if (m == full)
            break;
    }
    return Event{full & ~excluded};
}

} // namespace detail

/**
 * Betting menu of a lower envelope.
 *
 * Derived envelopes price every event, so the menu is every union of atoms
 * that touch no negative-valued event. An elicited envelope only commits to
 * its explicitly priced events: the menu keeps the quoted events of
 * nonnegative value that are disjoint from every quoted negative one;
 * vacuous defaults neither join nor block the menu.
 */
inline BettingTable lower_betting_table(const Envelope& env) {
    const std::size_t n = env.n_states();
    BettingTable table;
    table.n_states = n;
    if (env.source() == Envelope::Source::derived) {
        const auto lower = env.lower_table();
        table.events = bettable_events(detail::bettable_atoms_of_table(lower, n), n);
        table.prices.reserve(table.events.size());
        for (Event e : table.events)
            table.prices.push_back(lower[e.mask()]);
        return table;
    }
    const auto specified = env.specified_events();
    for (Event e : specified) {
        if (e.empty() || env.lower(e) < 0.0)
            continue;
        bool blocked = false;
        for (Event c : specified) {
            if (env.lower(c) < 0.0 && !e.disjoint_from(c)) {
                blocked = true;
                break;
            }
        }
        if (!blocked) {
            table.events.push_back(e);
            table.prices.push_back(env.lower(e));
        }
    }
    return table;
}

namespace detail {

/// Feasibility LP for one sign pattern: find y >= 0 with
///   sum_w sigma_w y_w 1_A(w) >= lower(A) for every event A,
///   sum_w sigma_w y_w = lower(Omega),   sum_w y_w = 1.
inline std::optional<std::vector<double>> solve_sign_pattern(
    const std::vector<double>& lower, std::size_t n, std::uint64_t sign_mask) {
    const std::uint64_t full = (n == 64) ? ~std::uint64_t{0} : ((std::uint64_t{1} << n) - 1);
    const auto sigma = [&](std::size_t w) { return ((sign_mask >> w) & 1u) ? -1.0 : 1.0; };

    std::vector<std::vector<double>> A;
    std::vector<double> b;
    A.reserve((full + 1) + 3);

    // Domination: -sum_{w in M} sigma_w y_w <= -lower(M). The full-space
    // event doubles as half of the equality constraint.
    for (std::uint64_t m = 1; m <= full; ++m) {
        std::vector<double> row(n, 0.0);
        Event{m}.for_each([&](std::size_t w) { row[w] = -sigma(w); });
        A.push_back(std::move(row));
        b.push_back(-lower[m]);
        if (m == full)
            break;
    }
    {
        std::vector<double> row(n, 0.0);
        for (std::size_t w = 0; w < n; ++w)
            row[w] = sigma(w);
        A.push_back(std::move(row));
        b.push_back(lower[full]);
    }
    // Absolute-sum axiom: sum y = 1 as a pair of inequalities.
    A.push_back(std::vector<double>(n, 1.0));
    b.push_back(1.0);
    A.push_back(std::vector<double>(n, -1.0));
    b.push_back(-1.0);

    const auto res = lp::maximize(A, b, std::vector<double>(n, 0.0));
    if (res.status != lp::Status::optimal)
        return std::nullopt;
    return res.x;
}

} // namespace detail

/**
 * Core of a lower envelope: extended measures dominating it on every event
 * with matching whole-space value.
 *
 * The absolute-sum constraint is nonconvex, so the search enumerates sign
 * patterns and solves one exact LP each; patterns contradicted by the
 * singleton bounds (a positive singleton lower pins +, an implied negative
 * upper pins -) are skipped. Nonempty cores certify coherence outright; an
 * empty core falls back to a direct Dutch-book LP on the elicited table.
 */
inline CoreReport core(const Envelope& env, std::size_t n_cap = 12) {
    const std::size_t n = env.n_states();
    if (n > n_cap)
        throw space_too_large_error("core search enumerates sign patterns over 2^N events; "
                                    "capped at " + std::to_string(n_cap) + " states");
    const auto lower = env.lower_table();
    const std::uint64_t full = env.space().full_mask();

    CoreReport rep;
    if (lower[0] > kIdentityTol) {
        // No measure can dominate a positive value on the empty event.
        rep.nonempty = false;
    } else {
        // Pin atom signs where the envelope decides them.
        std::vector<int> forced(n, 0);
        std::vector<std::size_t> free_atoms;
        for (std::size_t w = 0; w < n; ++w) {
            const double lo = lower[std::uint64_t{1} << w];
            const double implied_up = lower[full] - lower[full & ~(std::uint64_t{1} << w)];
            if (lo > kIdentityTol)
                forced[w] = +1;
            else if (implied_up < -kIdentityTol)
                forced[w] = -1;
            else
                free_atoms.push_back(w);
        }

        const std::uint64_t patterns = std::uint64_t{1} << free_atoms.size();
        for (std::uint64_t p = 0; p < patterns && !rep.nonempty; ++p) {
            std::uint64_t sign_mask = 0;
            for (std::size_t w = 0; w < n; ++w)
                if (forced[w] < 0)
                    sign_mask |= std::uint64_t{1} << w;
            for (std::size_t k = 0; k < free_atoms.size(); ++k)
                if ((p >> k) & 1u)
                    sign_mask |= std::uint64_t{1} << free_atoms[k];

            ++rep.patterns_tried;
            auto y = detail::solve_sign_pattern(lower, n, sign_mask);
            if (!y)
                continue;

            // Renormalize the LP point exactly onto the absolute-sum sphere
            // and re-verify domination at the LP tolerance.
            double sum = 0.0;
            for (double v : *y)
                sum += v;
            if (!(sum > 0.5))
                continue;
            std::vector<double> atoms(n, 0.0);
            for (std::size_t w = 0; w < n; ++w)
                atoms[w] = (((sign_mask >> w) & 1u) ? -1.0 : 1.0) * (*y)[w] / sum;
            const auto values = event_value_table(atoms);
            bool ok = std::fabs(values[full] - lower[full]) <= kCoherenceTol;
            for (std::uint64_t m = 0; ok && m <= full; ++m) {
                ok = values[m] >= lower[m] - kCoherenceTol;
                if (m == full)
                    break;
            }
            if (!ok)
                continue;

            rep.nonempty = true;
            rep.witness = ExtendedMeasure::create(env.space(), atoms);
            rep.witness_slack.resize(values.size());
            for (std::uint64_t m = 0; m < values.size(); ++m)
                rep.witness_slack[m] = values[m] - lower[m];
        }
    }

    if (rep.nonempty) {
        rep.coherent = true;
        rep.certificate = "witness";
        return rep;
    }

    // Empty core: certify or refute coherence directly from the envelope's
    // betting menu.
    rep.dutch_book = find_dutch_book(lower_betting_table(env));
    rep.coherent = !rep.dutch_book.has_value();
    rep.certificate = rep.dutch_book ? "dutch_book" : "stake_lp_clean";
    return rep;
}

} // namespace xprob
