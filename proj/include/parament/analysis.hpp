// analysis.hpp — Entanglement onset, death, lifetime and steady value from E_N(t)

#pragma once

#include <optional>
#include <string>

#include "parament/integrator.hpp"
#include "parament/negativity.hpp"

namespace parament {

struct AnalysisOptions {
    double eps_on{1e-10};            // E_N above this counts as entangled
    double hysteresis{2.0};          // entanglement ends when E_N < eps_on / hysteresis
    double horizon{0.0};             // <= 0 selects 100 / gamma
    double plateau_window{0.0};      // <= 0 selects default_plateau_window(params)
    double plateau_rel_change{1e-4};
    // Moments above this magnitude no longer resolve nbar - |c| in double precision;
    // samples beyond it are discarded and the run is stopped.
    double resolution_cap{1e12};
    double time_resolution{1e-3};    // bisection tolerance for crossing times
    bool stop_at_onset{false};       // classification runs only need to see the onset
};

// 5 / (gamma + omega epsilon / 2): five relaxation times of nbar - |c| at resonance.
double default_plateau_window(const SystemParams& params);
double default_horizon(const SystemParams& params);

struct ReportFlags {
    bool overflow_truncated{false};
    bool horizon_truncated{false};
    bool resolution_truncated{false};
    bool multiple_intervals{false};

    std::string to_string() const;   // '|'-joined names, empty when none set
};

struct EntanglementReport {
    std::optional<double> t_onset;
    double t_death{0.0};             // +inf when unbounded
    double tau{0.0};                 // +inf when unbounded
    double e_n_max{0.0};
    std::optional<double> t_peak;
    std::optional<double> e_n_steady;
    double t_final{0.0};             // last resolved sample
    double e_n_final{0.0};
    ReportFlags flags;

    bool entangled() const { return t_onset.has_value(); }
    bool unbounded() const;
};

NegativityResult state_negativity(const MomentState& state);

EntanglementReport analyze_trajectory(const Trajectory& traj, const AnalysisOptions& options = {});

struct EntanglementRun {
    Trajectory trajectory;
    EntanglementReport report;
};

// Integrates from thermal equilibrium, stopping once the outcome is decided
// (plateau, death, onset when requested, resolution limit or horizon), then analyzes.
EntanglementRun run_entanglement(const SystemParams& params,
                                 const IntegratorControls& controls = {},
                                 const AnalysisOptions& options = {});

// Plateau value of E_N for a coherent pump (noise_width == 0).
double steady_state_negativity(const SystemParams& params,
                               const IntegratorControls& controls = {},
                               const AnalysisOptions& options = {});

} // namespace parament
