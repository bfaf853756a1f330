#pragma once

#include <stdexcept>
#include <string>

namespace reslab {

// Input outside the documented domain of an operation.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// No evaluation regime attains the requested accuracy at this input.
struct AccuracyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Evaluation landed on (or indistinguishably near) a pole.
struct PoleError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A truncated sum could not be driven below its tolerance within the term cap.
struct TruncationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A contour passed too close to a zero and perturbation retries ran out.
struct ContourError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// An iterative refinement failed to meet its stopping criterion.
struct NoConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Fit input degenerate (too few points, insufficient span, or non-positive data).
struct FitError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Continuous phase tracking could not certify an unwrap step.
struct UnwrapError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace reslab
