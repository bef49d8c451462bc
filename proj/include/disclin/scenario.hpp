#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "disclin/flow.hpp"
#include "disclin/glide.hpp"
#include "disclin/model.hpp"

// Benchmark registry, scenario configs, and trace persistence. Scenarios
// dispatch to the free gradient flow, the glide inclusion, the scalar dipole
// model, or the constrained superposed pair, and their results serialize to
// a deterministic CSV trace with a JSON sidecar.

namespace disclin {

inline constexpr const char* kToolVersion = "1.0.0";

enum class ScenarioMode { free_flow, glide, dipole, constrained_pair };

const char* to_string(ScenarioMode m);

struct Scenario {
    std::string name;
    Configuration disclinations;
    ScenarioMode mode = ScenarioMode::free_flow;
    std::optional<GlideSet> glide_set;  // required in glide mode
    std::string glide_set_name;         // "axes", "hex", or "custom"
    IntegratorSettings settings;
    Vec2 eps{1e-4, 0.0};  // constrained-pair offset xi1 - xi2
    std::string note;     // free-form remark echoed into the trace header
};

// The five built-in benchmarks, all free gradient flow:
//   b1_unequal_pair    s = (+1, -2) at (+-0.3, 0), T_end 1.6
//   b2_superposed_pair s = (+1, -2) superposed at (0.3, 0), T_end 1.0
//   b3_splitting       s = (+1, -1, +1), pair at (0.3, 0), third at (-0.3, 0), T_end 1.0
//   b4_triangle        equilateral side 0.48, s = (+1, -1, +1), T_end 8.0
//   b5_heptagon        regular heptagon radius 0.5, alternating s, T_end 4.0
// Superposed starts (b2, b3) are regularized by +-1e-8 displacements along
// the axis to the nearest other feature (the origin for b2, the third
// disclination for b3); the displacement is echoed in the note.
std::vector<Scenario> builtin_scenarios();

// Looks a built-in up by name; throws ValidationError for unknown names.
Scenario find_builtin(const std::string& name);

// Throws ValidationError naming the violated invariant (disk constraint,
// zero Frank angle, mode requirements, settings ranges).
void validate_scenario(const Scenario& sc);

struct TraceFile {
    std::vector<std::string> header;       // '#'-prefixed lines, in file order
    std::vector<std::string> columns;      // T, x1, y1, ..., H, F1, ...
    std::vector<std::vector<double>> rows; // times strictly increasing
    std::vector<Event> events;
};

// Runs the scenario and writes out_path (CSV with a '#' header block and an
// event section) plus a JSON sidecar with the same base name. Identical
// scenario + settings + tool version give byte-identical files. The seed is
// only echoed into the header; the dynamics are deterministic.
TraceFile run_scenario(const Scenario& sc, const std::string& out_path, std::uint64_t seed = 0);

// Serializes a scenario to JSON text; parse_config inverts it.
std::string serialize(const Scenario& sc);

// Parses a JSON scenario document. Unknown keys are rejected; validation
// errors name the violated invariant.
Scenario parse_config(const std::string& text);

}  // namespace disclin
