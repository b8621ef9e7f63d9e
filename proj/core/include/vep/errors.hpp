#pragma once

#include <stdexcept>

namespace vep {

// A phase-field or potential argument left its admissible range.
struct DomainError : std::domain_error {
    using std::domain_error::domain_error;
};

// An iterative solve hit its iteration cap; callers may retry with a smaller step.
struct NonConvergence : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// The interior safeguard could not keep |phi| below 1 - delta.
struct DomainViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct LinearSolveFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace vep
