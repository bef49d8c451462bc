#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "disclin/flow.hpp"
#include "disclin/model.hpp"

// Independent oracles: finite-difference gradients of the energy, a
// fixed-step explicit-Euler reference integrator, and a deterministic
// invariant suite. The oracles live in the library (not in the tests) so the
// CLI selfcheck command can run them in the field. fd_gradient uses only
// energy(); euler_reference uses only total_force(); neither touches the
// adaptive integrator.

namespace disclin {

// Central-difference approximation of -d(energy)/d(p_k) with the given step.
// Throws DomainExitError when a perturbed position leaves the closed disk or
// collides with another disclination.
Vec2 fd_gradient(const Configuration& cfg, std::size_t k, double step);

// Fixed-step explicit Euler on the gradient flow; one sample per step.
// Converges first order in dt to the adaptive trajectory. Throws
// DomainExitError if a step leaves the open disk or crosses the separation
// guard.
Trace euler_reference(const Configuration& cfg0, double dt, double t_end);

struct OracleCase {
    std::string name;
    double value = 0.0;      // measured metric for this case
    double threshold = 0.0;  // declared bound on the metric
    bool pass = false;
};

struct OracleReport {
    std::string name;
    double max_abs_error = 0.0;
    double max_rel_error = 0.0;
    bool pass = false;
    std::vector<OracleCase> details;  // sorted by case name
};

// Runs every module invariant check with deterministic pseudo-randomness
// derived from the seed (mt19937_64 with an explicit bit mapping to doubles,
// so reports are identical across platforms). Reports are sorted by name.
std::vector<OracleReport> run_invariant_suite(std::uint64_t seed);

// Fixed-format rendering of a report list; identical inputs give identical
// text, which is what the determinism contract of the suite is tested on.
std::string format_reports(const std::vector<OracleReport>& reports);

// True when every report passes.
bool all_pass(const std::vector<OracleReport>& reports);

}  // namespace disclin
