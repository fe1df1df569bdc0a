#pragma once

#include <stdexcept>
#include <string>

namespace llax {

// Series truncation failed to reach the requested tolerance within the cap.
struct PrecisionError : std::runtime_error {
    explicit PrecisionError(const std::string& what) : std::runtime_error(what) {}
};

// An argument landed too close to a zero of theta appearing in a denominator.
// `argument` names the offending slot ("z", "u", ...).
struct NearPoleError : std::runtime_error {
    std::string argument;
    NearPoleError(std::string arg, const std::string& what)
        : std::runtime_error(what), argument(std::move(arg)) {}
};

// An iterative scheme (constraint projection) failed to converge.
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// Time evolution left the validity region (constraint drift past the abort bound).
struct NumericalAbort : std::runtime_error {
    explicit NumericalAbort(const std::string& what) : std::runtime_error(what) {}
};

} // namespace llax
