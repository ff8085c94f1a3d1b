#pragma once

#include <stdexcept>
#include <string>

namespace mzi {

// Iteration budget exhausted or a quadrature refinement failed to settle.
struct ConvergenceError : std::runtime_error {
    explicit ConvergenceError(const std::string& what) : std::runtime_error(what) {}
};

// A signal never reaches the requested level inside the search interval.
struct NoCrossingError : std::runtime_error {
    explicit NoCrossingError(const std::string& what) : std::runtime_error(what) {}
};

// Probability pinned at 0 or 1 with no finite Fisher limit available.
struct DegenerateModelError : std::runtime_error {
    explicit DegenerateModelError(const std::string& what) : std::runtime_error(what) {}
};

// Too many repetitions of a simulated experiment failed to invert.
struct ExperimentAbort : std::runtime_error {
    explicit ExperimentAbort(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace mzi
