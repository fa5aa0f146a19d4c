// oracle.hpp — Monte-Carlo check of the phase-noise averaging: pathwise moment
// equations driven by sampled Wiener phases, compared with the averaged ODE.

#pragma once

#include <complex>
#include <cstdint>
#include <string>
#include <vector>

#include "parament/integrator.hpp"

namespace parament {

// Largest step satisfying (omega eps / 2) dt <= 1e-2 and D dt <= 1e-2, also bounded
// by 0.1 / gamma and 1 / omega.
double default_oracle_step(const SystemParams& params);

// Throws std::invalid_argument when dt violates the step bounds above.
void check_oracle_step(const SystemParams& params, double dt);

// Seed of path i derived from the master seed (splitmix64 of master + i).
std::uint64_t path_seed(std::uint64_t master, std::uint64_t index);

struct PathRecord {
    std::vector<double> times;          // t = 0 followed by the checkpoints
    std::vector<MomentState> states;
    std::vector<double> phases;         // phi(t) at the same times
};

// One realization of phi(t) (phi(0) = 0, increments N(0, 2 D dt)) and the moment
// systems driven by it. The step count is round(t_end / dt); checkpoints snap to
// the nearest step.
PathRecord simulate_realization(const SystemParams& params, std::uint64_t seed, double dt,
                                double t_end, const std::vector<double>& checkpoints);

struct OracleOptions {
    std::size_t n_paths{10000};
    double dt{0.0};                     // <= 0 selects default_oracle_step
    double t_end{0.0};
    std::vector<double> checkpoints;    // empty: 10 evenly spaced in (0, t_end]
    std::uint64_t master_seed{20240601};
    unsigned threads{0};
    double z_threshold{3.0};
    double pass_fraction{0.95};
    IntegratorControls ode_controls{1e-11, 1e-14};
};

// Mean and standard error of every real and imaginary part at each checkpoint.
// Standard errors are stored as complex(se of real part, se of imaginary part).
struct PathEnsemble {
    std::size_t n_paths{0};
    double dt{0.0};
    std::uint64_t master_seed{0};
    std::vector<double> times;
    std::vector<MomentState> mean;
    std::vector<MomentState> std_error;
};

PathEnsemble run_ensemble(const SystemParams& params, const OracleOptions& options);

struct PairCheck {
    double t{0.0};
    int n{0};                           // 1..5
    int k{0};                           // 1..3
    char part{'r'};                     // 'r' or 'i'
    double mc{0.0};
    double se{0.0};
    double ode{0.0};
    double z{0.0};                      // |mc - ode| / se (0 when both vanish)
    bool passed{false};
};

struct OracleReport {
    PathEnsemble ensemble;
    std::vector<MomentState> ode;       // averaged ODE at the checkpoints
    std::vector<PairCheck> pairs;       // every (checkpoint, component, part)
    std::size_t nontrivial{0};          // pairs where either side is nonzero
    std::size_t passed{0};              // nontrivial pairs within z_threshold
    double pass_fraction{0.0};          // passed / nontrivial
    double worst_z{0.0};
    PairCheck worst;
    std::vector<std::string> offenders; // components with a failing pair, e.g. "u4[2].re"
    bool pass{false};
};

// Runs the ensemble and the averaged ODE and compares them pairwise.
// Pairs that are zero on both sides (systems that are never excited) are listed
// but excluded from the pass fraction.
OracleReport mc_compare(const SystemParams& params, const OracleOptions& options);

struct PhaseFactorEstimate {
    std::complex<double> mean;
    double se_real{0.0};
    double se_imag{0.0};
};

// Ensemble mean of exp(i k phi(t)) from the same phase sampler the oracle uses.
PhaseFactorEstimate sample_phase_factor(double noise_width, double t, int k, std::size_t n_paths,
                                        double dt, std::uint64_t master_seed);

} // namespace parament
