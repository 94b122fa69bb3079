#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "xprob/event.hpp"
#include "xprob/state_space.hpp"

namespace xprob {

/// Tolerance for identities that hold exactly in real arithmetic
/// (additivity, complement, inclusion-exclusion, the absolute-sum axiom).
inline constexpr double kIdentityTol = 1e-12;

/// Strictness threshold for LP optima and Dutch-book payoffs.
inline constexpr double kCoherenceTol = 1e-9;

struct AxiomCheck {
    std::string name;
    bool pass = true;
    double residual = 0.0;
    std::string note;
};

struct ValidationReport {
    bool pass = false;
    double abs_sum_residual = 0.0; // | sum_w |a_w| - 1 |
    std::vector<AxiomCheck> checks;

    const AxiomCheck* find(const std::string& name) const {
        for (const auto& c : checks)
            if (c.name == name)
                return &c;
        return nullptr;
    }
};

/**
 * An extended probability measure on a finite state space.
 *
 * The atoms are the primitive: one signed value per state, each in [-1, 1],
 * with absolute values summing to 1. Event values are sums of atoms, so
 * countable additivity holds by construction and every event evaluation
 * is O(N).
 *
 * Instances are immutable values; all operations are pure and safe to share
 * across threads.
 */
class ExtendedMeasure {
public:
    /// Strict factory: enforces the atom range, the absolute-sum axiom
    /// (within kIdentityTol), and shape. Throws validation_error naming the
    /// violated condition.
    static ExtendedMeasure create(StateSpace space, std::vector<double> atoms) {
        check_shape(space, atoms);
        check_range(atoms);
        const double r = abs_sum_residual(atoms);
        if (r > kIdentityTol)
            throw validation_error("axiom (iii*): sum of |atoms| is " +
                                   std::to_string(1.0 + r_signed(atoms)) +
                                   ", must be 1 within 1e-12");
        return ExtendedMeasure(std::move(space), std::move(atoms), false);
    }

    /// Relaxed factory: only shape and the per-atom range are enforced.
    /// The absolute-sum axiom may fail; validate() reports the residual.
    /// This path exists for the opinion-dynamics model, whose influenced
    /// measures satisfy a weaker validity condition.
    static ExtendedMeasure create_relaxed(StateSpace space, std::vector<double> atoms) {
        check_shape(space, atoms);
        check_range(atoms);
        return ExtendedMeasure(std::move(space), std::move(atoms), true);
    }

    const StateSpace& space() const noexcept { return space_; }
    const std::vector<double>& atoms() const noexcept { return atoms_; }
    double atom(std::size_t i) const { return atoms_.at(i); }
    std::size_t size() const noexcept { return atoms_.size(); }
    bool relaxed() const noexcept { return relaxed_; }

    /// P(A) = sum of atoms over A. Empty events evaluate to 0.
    double eval(Event A) const {
        require_valid_event(space_, A);
        double s = 0.0;
        A.for_each([&](std::size_t i) { s += atoms_[i]; });
        return s;
    }

    /// P(Omega).
    double total() const {
        double s = 0.0;
        for (double a : atoms_)
            s += a;
        return s;
    }

    /// P(A^c) = P(Omega) - P(A). Equal to eval of the complement event.
    double complement(Event A) const {
        require_valid_event(space_, A);
        return total() - eval(A);
    }

    /**
     * Conditional value P(A|B) = P(A and B) / P(B).
     *
     * Requires |P(B)| > kIdentityTol. The definition asserts a [-1,1] range,
     * which holds whenever B lies inside one sign class; conditioning on a
     * mixed-sign event can produce a ratio outside that range, and we return
     * the raw ratio in that case.
     */
    double conditional(Event A, Event B) const {
        require_valid_event(space_, A);
        require_valid_event(space_, B);
        const double pb = eval(B);
        if (std::fabs(pb) <= kIdentityTol)
            throw conditioning_on_null_error("conditioning event has extended probability 0");
        return eval(A & B) / pb;
    }

    /// Sign-robust independence: | |P(A and B)| - |P(A) P(B)| | <= tol.
    bool is_independent(Event A, Event B, double tol) const {
        if (!(tol > 0.0))
            throw validation_error("independence tolerance must be positive");
        const double joint = std::fabs(eval(A & B));
        const double prod = std::fabs(eval(A) * eval(B));
        return std::fabs(joint - prod) <= tol;
    }

    /// True when the measure is a regular probability: nonnegative atoms
    /// with total 1.
    bool is_regular(double tol = kIdentityTol) const {
        for (double a : atoms_)
            if (a < 0.0)
                return false;
        return std::fabs(total() - 1.0) <= tol;
    }

    /**
     * Per-axiom report: atom range (i*), absolute-sum residual (iii*), and
     * seeded spot-checks of the inclusion-exclusion identity on random event
     * pairs. Additivity (ii*) holds by construction from atoms and is noted
     * as such.
     */
    ValidationReport validate(std::uint64_t seed = 0, std::size_t sample_pairs = 64) const {
        ValidationReport rep;

        AxiomCheck range{"i* atom range", true, 0.0, ""};
        for (double a : atoms_) {
            if (!std::isfinite(a)) {
                range.pass = false;
                range.note = "non-finite atom";
            }
            const double excess = std::fabs(a) - 1.0;
            if (excess > range.residual)
                range.residual = excess;
        }
        if (range.residual > 0.0)
            range.pass = false;
        rep.checks.push_back(range);

        rep.checks.push_back(AxiomCheck{
            "ii* additivity", true, 0.0, "holds by construction from atoms"});

        AxiomCheck abs_sum{"iii* absolute sum", true, abs_sum_residual(atoms_), ""};
        abs_sum.pass = abs_sum.residual <= kIdentityTol;
        rep.abs_sum_residual = abs_sum.residual;
        rep.checks.push_back(abs_sum);

        AxiomCheck incl_excl{"inclusion-exclusion", true, 0.0, ""};
        std::mt19937_64 rng(seed);
        const std::uint64_t full = space_.full_mask();
        for (std::size_t k = 0; k < sample_pairs; ++k) {
            const Event A{rng() & full};
            const Event B{rng() & full};
            const double lhs = eval(A | B);
            const double rhs = eval(A) + eval(B) - eval(A & B);
            const double r = std::fabs(lhs - rhs);
            if (r > incl_excl.residual)
                incl_excl.residual = r;
        }
        incl_excl.pass = incl_excl.residual <= kIdentityTol;
        rep.checks.push_back(incl_excl);

        rep.pass = true;
        for (const auto& c : rep.checks)
            rep.pass = rep.pass && c.pass;
        return rep;
    }

    bool operator==(const ExtendedMeasure& other) const {
        return space_ == other.space_ && atoms_ == other.atoms_;
    }

private:
    ExtendedMeasure(StateSpace space, std::vector<double> atoms, bool relaxed)
        : space_(std::move(space)), atoms_(std::move(atoms)), relaxed_(relaxed) {}

    static void check_shape(const StateSpace& space, const std::vector<double>& atoms) {
        if (atoms.size() != space.size())
            throw validation_error("atom vector length " + std::to_string(atoms.size()) +
                                   " does not match space size " + std::to_string(space.size()));
    }

    static void check_range(const std::vector<double>& atoms) {
        for (std::size_t i = 0; i < atoms.size(); ++i) {
            if (!std::isfinite(atoms[i]) || std::fabs(atoms[i]) > 1.0)
                throw validation_error("axiom (i*): atom " + std::to_string(i) +
                                       " = " + std::to_string(atoms[i]) + " is outside [-1, 1]");
        }
    }

    static double abs_sum_residual(const std::vector<double>& atoms) {
        return std::fabs(r_signed(atoms));
    }

    static double r_signed(const std::vector<double>& atoms) {
        double s = 0.0;
        for (double a : atoms)
            s += std::fabs(a);
        return s - 1.0;
    }

    StateSpace space_;
    std::vector<double> atoms_;
    bool relaxed_ = false;
};

/**
 * sum_{w in A} a_w for every event mask at once, built so that table[A]
 * accumulates atoms in ascending index order. O(2^N); used by the
 * enumeration-guarded operations.
 */
inline std::vector<double> event_value_table(const std::vector<double>& atoms) {
    const std::size_t n = atoms.size();
    if (n > 26)
        throw space_too_large_error("event table enumeration capped at 26 states");
    std::vector<double> table(std::size_t{1} << n, 0.0);
    for (std::uint64_t m = 1; m < table.size(); ++m) {
        const int hi = 63 - std::countl_zero(m);
        table[m] = table[m ^ (std::uint64_t{1} << hi)] + atoms[static_cast<std::size_t>(hi)];
    }
    return table;
}

} // namespace xprob
