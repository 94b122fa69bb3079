#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace xprob {

/// Base class for all toolkit errors.
class error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// An event references state indices outside its space.
class invalid_event_error : public error {
public:
    using error::error;
};

/// Conditioning event has value 0 (below the identity tolerance).
class conditioning_on_null_error : public error {
public:
    using error::error;
};

/// Strict-mode construction or load rejected the input; the message names
/// the violated axiom or condition.
class validation_error : public error {
public:
    using error::error;
};

/// An enumeration-guarded operation was asked to enumerate too large a space.
class space_too_large_error : public error {
public:
    using error::error;
};

/// Numerical failure (e.g. the LP solver did not terminate).
class numeric_error : public error {
public:
    using error::error;
};

/// File or format problem in the I/O layer.
class io_error : public error {
public:
    using error::error;
};

/// An observation fell outside the declared state space. The analysis must
/// be restarted over a richer space; the caller decides how to enlarge it
/// (add the single state, or move to a larger number type), so we only carry
/// the foreign label.
class restart_required : public error {
public:
    explicit restart_required(std::string observed)
        : error("observation '" + observed + "' does not belong to the state space; restart required"),
          observed_(std::move(observed)) {}

    const std::string& observed() const noexcept { return observed_; }

private:
    std::string observed_;
};

} // namespace xprob
