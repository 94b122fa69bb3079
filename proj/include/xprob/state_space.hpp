#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "xprob/errors.hpp"

namespace xprob {

/// Records how a countable number type was cut down to a finite universe.
/// Explicit spaces carry no truncation information.
enum class origin_kind {
    explicit_set,
    truncated_naturals,
    truncated_integers,
    truncated_rationals,
};

struct origin_tag {
    origin_kind kind = origin_kind::explicit_set;
    std::int64_t n_max = 0;   // truncated_naturals / truncated_integers
    std::string detail;       // truncated_rationals: textual truncation rule

    static origin_tag explicit_set() { return {}; }
    static origin_tag naturals(std::int64_t n_max) {
        return {origin_kind::truncated_naturals, n_max, {}};
    }
    static origin_tag integers(std::int64_t n_max) {
        return {origin_kind::truncated_integers, n_max, {}};
    }
    static origin_tag rationals(std::string detail) {
        return {origin_kind::truncated_rationals, 0, std::move(detail)};
    }

    bool operator==(const origin_tag&) const = default;
};

/**
 * Ordered finite universe of labeled states.
 *
 * The finest partition is implicitly the list of singletons in label order.
 * Labels are stored as strings; spaces whose labels are all integral render
 * back to numbers on serialization. Events are 64-bit masks, which bounds a
 * space at 64 states; countable spaces enter only as explicit truncations
 * (see origin_tag), and every instance in this toolkit is desk-scale.
 */
class StateSpace {
public:
    static constexpr std::size_t max_states = 64;

    explicit StateSpace(std::vector<std::string> labels, origin_tag origin = {})
        : labels_(std::move(labels)), origin_(origin) {
        if (labels_.empty())
            throw validation_error("state space must contain at least one state");
        if (labels_.size() > max_states)
            throw space_too_large_error("state space exceeds " + std::to_string(max_states) +
                                        " states; truncate further");
        index_.reserve(labels_.size());
        for (std::size_t i = 0; i < labels_.size(); ++i) {
            if (!index_.emplace(labels_[i], i).second)
                throw validation_error("duplicate state label '" + labels_[i] + "'");
        }
    }

    /// {1..n_max} as a truncation of the naturals.
    static StateSpace naturals(std::int64_t n_max) {
        if (n_max < 1)
            throw validation_error("naturals truncation requires n_max >= 1");
        std::vector<std::string> labels;
        labels.reserve(static_cast<std::size_t>(n_max));
        for (std::int64_t k = 1; k <= n_max; ++k)
            labels.push_back(std::to_string(k));
        return StateSpace(std::move(labels), origin_tag::naturals(n_max));
    }

    std::size_t size() const noexcept { return labels_.size(); }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::string& label(std::size_t i) const { return labels_.at(i); }
    const origin_tag& origin() const noexcept { return origin_; }

    std::optional<std::size_t> index_of(const std::string& label) const {
        auto it = index_.find(label);
        if (it == index_.end())
            return std::nullopt;
        return it->second;
    }

    bool contains(const std::string& label) const { return index_.count(label) != 0; }

    std::uint64_t full_mask() const noexcept {
        return size() == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << size()) - 1);
    }

    bool numeric_labels() const {
        for (const auto& l : labels_)
            if (!is_integral_label(l))
                return false;
        return true;
    }

    /// Two spaces agree when their label lists agree; the origin tag is
    /// bookkeeping and does not affect identity.
    bool operator==(const StateSpace& other) const { return labels_ == other.labels_; }
    bool operator!=(const StateSpace& other) const { return !(*this == other); }

private:
    static bool is_integral_label(const std::string& s) {
        if (s.empty() || s.size() > 18) // stay inside int64 when rendering back
            return false;
        std::size_t i = (s[0] == '-') ? 1 : 0;
        if (i == s.size())
            return false;
        for (; i < s.size(); ++i)
            if (s[i] < '0' || s[i] > '9')
                return false;
        // forbid non-canonical forms like "01" so render(parse(x)) == x
        if (s[0] == '0' && s.size() > 1)
            return false;
        if (s[0] == '-' && s[1] == '0')
            return false;
        return true;
    }

    std::vector<std::string> labels_;
    std::unordered_map<std::string, std::size_t> index_;
    origin_tag origin_;
};

} // namespace xprob
