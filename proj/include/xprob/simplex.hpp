#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <utility>
#include <vector>

#include "xprob/errors.hpp"

namespace xprob::lp {

enum class Status { optimal, infeasible, unbounded };

struct Result {
    Status status = Status::optimal;
    double objective = 0.0;
    std::vector<double> x;
};

/**
 * Dense two-phase simplex for   max c'x  s.t.  Ax <= b, x >= 0.
 *
 * Tableau method with Bland-style index tie-breaking, sized for the tiny
 * dense problems in this toolkit (tens of rows, up to a few thousand
 * columns). Throws numeric_error if the pivot count exceeds a generous cap.
 */
class Simplex {
public:
    Simplex(const std::vector<std::vector<double>>& A,
            const std::vector<double>& b,
            const std::vector<double>& c)
        : m_(b.size()), n_(c.size()), nonbasic_(n_ + 1), basic_(m_),
          tab_(m_ + 2, std::vector<double>(n_ + 2, 0.0)) {
        for (std::size_t i = 0; i < m_; ++i)
            for (std::size_t j = 0; j < n_; ++j)
                tab_[i][j] = A[i][j];
        for (std::size_t i = 0; i < m_; ++i) {
            basic_[i] = static_cast<int>(n_ + i);
            tab_[i][n_] = -1.0;
            tab_[i][n_ + 1] = b[i];
        }
        for (std::size_t j = 0; j < n_; ++j) {
            nonbasic_[j] = static_cast<int>(j);
            tab_[m_][j] = -c[j];
        }
        nonbasic_[n_] = -1;
        tab_[m_ + 1][n_] = 1.0;
    }

    Result solve() {
        Result res;
        if (n_ == 0) {
            // no variables: feasible iff all b_i >= 0
            for (std::size_t i = 0; i < m_; ++i)
                if (tab_[i][n_ + 1] < -kEps) {
                    res.status = Status::infeasible;
                    return res;
                }
            res.status = Status::optimal;
            return res;
        }
        std::size_t r = 0;
        for (std::size_t i = 1; i < m_; ++i)
            if (tab_[i][n_ + 1] < tab_[r][n_ + 1])
                r = i;
        if (m_ > 0 && tab_[r][n_ + 1] < -kEps) {
            pivot(r, n_);
            if (!run_phase(2) || tab_[m_ + 1][n_ + 1] < -kEps) {
                res.status = Status::infeasible;
                return res;
            }
            for (std::size_t i = 0; i < m_; ++i) {
                if (basic_[i] == -1) {
                    std::size_t s = 0;
                    for (std::size_t j = 1; j <= n_; ++j)
                        if (prefer(tab_[i][j], nonbasic_[j], tab_[i][s], nonbasic_[s]))
                            s = j;
                    pivot(i, s);
                }
            }
        }
        const bool bounded = run_phase(1);
        res.x.assign(n_, 0.0);
        for (std::size_t i = 0; i < m_; ++i)
            if (basic_[i] >= 0 && basic_[i] < static_cast<int>(n_))
                res.x[static_cast<std::size_t>(basic_[i])] = tab_[i][n_ + 1];
        if (!bounded) {
            res.status = Status::unbounded;
            return res;
        }
        res.status = Status::optimal;
        res.objective = tab_[m_][n_ + 1];
        return res;
    }

private:
    static constexpr double kEps = 1e-9;

    static bool prefer(double val_a, int idx_a, double val_b, int idx_b) {
        if (val_a != val_b)
            return val_a < val_b;
        return idx_a < idx_b;
    }

    void pivot(std::size_t r, std::size_t s) {
        if (++pivots_ > pivot_cap())
            throw numeric_error("simplex did not terminate within the pivot cap");
        auto& row = tab_[r];
        const double inv = 1.0 / row[s];
        for (std::size_t i = 0; i < m_ + 2; ++i) {
            if (i != r && std::fabs(tab_[i][s]) > kEps) {
                auto& other = tab_[i];
                const double factor = other[s] * inv;
                for (std::size_t j = 0; j < n_ + 2; ++j)
                    other[j] -= row[j] * factor;
                other[s] = row[s] * factor;
            }
        }
        for (std::size_t j = 0; j < n_ + 2; ++j)
            if (j != s)
                row[j] *= inv;
        for (std::size_t i = 0; i < m_ + 2; ++i)
            if (i != r)
                tab_[i][s] *= -inv;
        row[s] = inv;
        std::swap(basic_[r], nonbasic_[s]);
    }

    bool run_phase(int phase) {
        const std::size_t obj_row = m_ + static_cast<std::size_t>(phase) - 1;
        for (;;) {
            std::size_t s = n_ + 1;
            for (std::size_t j = 0; j <= n_; ++j) {
                if (nonbasic_[j] == -phase)
                    continue;
                if (s == n_ + 1 || prefer(tab_[obj_row][j], nonbasic_[j], tab_[obj_row][s], nonbasic_[s]))
                    s = j;
            }
            if (s == n_ + 1 || tab_[obj_row][s] >= -kEps)
                return true;
            std::size_t r = m_;
            for (std::size_t i = 0; i < m_; ++i) {
                if (tab_[i][s] <= kEps)
                    continue;
                if (r == m_ ||
                    prefer(tab_[i][n_ + 1] / tab_[i][s], basic_[i],
                           tab_[r][n_ + 1] / tab_[r][s], basic_[r]))
                    r = i;
            }
            if (r == m_)
                return false; // unbounded direction
            pivot(r, s);
        }
    }

    std::size_t pivot_cap() const { return 2000 + 200 * (m_ + n_); }

    std::size_t m_, n_;
    std::vector<int> nonbasic_, basic_;
    std::vector<std::vector<double>> tab_;
    std::size_t pivots_ = 0;
};

/// max c'x s.t. Ax <= b, x >= 0.
inline Result maximize(const std::vector<std::vector<double>>& A,
                       const std::vector<double>& b,
                       const std::vector<double>& c) {
    return Simplex(A, b, c).solve();
}

} // namespace xprob::lp
