#pragma once

#include <stdexcept>

namespace disclin {

// Two disclinations closer than the minimum-separation guard; energy and
// forces are singular there and callers must switch to the superposed model.
struct CoincidentPositionsError : std::domain_error {
    using std::domain_error::domain_error;
};

// PhysicalScales outside the admissible ranges (E, R, lambda > 0, nu in (-1, 0.5)).
struct InvalidScalesError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A configuration, settings block, or scenario violates a stated invariant.
struct ValidationError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A glide set fails its structural invariants (unit norm, symmetry, span, ...).
struct InvalidGlideSetError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A finite-difference probe or fixed-step trajectory left the open unit disk
// (or collapsed below the separation guard).
struct DomainExitError : std::domain_error {
    using std::domain_error::domain_error;
};

// The asymptotic branch requested does not cover the given initial separation.
struct BranchDomainError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// A call violated an operation precondition (e.g. the sliding-coefficient
// sign condition, which signals cross-slip rather than sliding).
struct PreconditionError : std::logic_error {
    using std::logic_error::logic_error;
};

// Internal integration failure that is not representable as a trace event.
struct IntegrationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace disclin
