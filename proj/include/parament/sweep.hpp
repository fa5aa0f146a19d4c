// sweep.hpp — Parameter grids over (D, n_T, eps, ...) and bisection for the tau > 0 boundary

#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "parament/analysis.hpp"
#include "parament/parallel.hpp"

namespace parament {

// Parameter names accepted by axes and boundaries: Q, nT, eps, D, Delta.
void set_parameter(SystemParams& params, const std::string& name, double value);
double get_parameter(const SystemParams& params, const std::string& name);
bool is_parameter_name(const std::string& name);

enum class Spacing { linear, log };

struct Axis {
    std::string name;
    double min{0.0};
    double max{0.0};
    int count{2};
    Spacing spacing{Spacing::linear};

    std::vector<double> values() const;
    // "name:lin|log:min:max:count", e.g. "D:log:1e-12:1e-6:25"
    static Axis parse(const std::string& text);
    std::string to_string() const;
};

// Report columns in schema order.
const std::vector<std::string>& sweep_output_names();

struct SweepSpec {
    std::vector<Axis> axes;        // one or two
    SystemParams fixed;            // values of the non-swept parameters
    std::vector<std::string> outputs;   // empty selects all of sweep_output_names()

    void validate() const;
    std::size_t cell_count() const;
    std::vector<std::string> resolved_outputs() const;
};

struct SweepRow {
    std::vector<double> values;    // one per axis
    EntanglementReport report;
    std::size_t steps{0};
    double wall_seconds{0.0};
    std::string error;             // empty unless this cell failed

    bool failed() const { return !error.empty(); }
};

struct RunOptions {
    IntegratorControls controls;
    AnalysisOptions analysis;
    unsigned threads{0};           // 0 selects the hardware concurrency
};

// Row-major over the axes (last axis fastest). Cell failures are recorded, never thrown.
std::vector<SweepRow> run_grid(const SweepSpec& spec, const RunOptions& options = {});

struct BoundaryResult {
    std::string axis;
    double value{0.0};             // midpoint of the final bracket
    double lo{0.0};                // final bracket
    double hi{0.0};
    bool entangled_below{false};   // which side of the boundary is entangled
    int evaluations{0};
    bool confirmed{false};         // full-horizon run agrees on the entangled end of the bracket
    std::optional<EntanglementReport> confirmation;
};

// Bisection on the predicate "tau > 0" (entanglement ever appears) along one axis.
// Throws std::invalid_argument when both bracket ends classify the same way.
BoundaryResult find_boundary(const SystemParams& fixed, const std::string& axis, double lo,
                             double hi, double rel_tol = 1e-3, const RunOptions& options = {});

// Horizon used by the bisection predicate: 30 / gamma (1e6 when undamped).
double classification_horizon(const SystemParams& params);

} // namespace parament
