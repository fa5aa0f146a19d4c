// integrator.hpp — Adaptive Dormand-Prince 5(4) integration of the five averaged
// moment systems with dense sampling.

#pragma once

#include <cstddef>
#include <functional>
#include <limits>
#include <vector>

#include "parament/model.hpp"

namespace parament {

using StateVector = Eigen::Matrix<cplx, 15, 1>;

StateVector to_vector(const MomentState& state);
MomentState to_state(const StateVector& y);

// d u_n / dt = drift_n u_n + forcing_n(t) for n = 1..5, stacked into one 15-vector.
class MomentSystem {
public:
    explicit MomentSystem(const SystemParams& params);
    explicit MomentSystem(const GeneratorSet& generators);

    // Same drift, forcing removed.
    static MomentSystem homogeneous(const SystemParams& params);

    void derivative(double t, const StateVector& y, StateVector& dy) const;

    const GeneratorSet& generators() const { return generators_; }
    // Largest modulus of any drift entry; sets the fastest time scale.
    double drift_scale() const;

private:
    GeneratorSet generators_;
};

struct IntegratorControls {
    double rel_tol{1e-9};
    double abs_tol{1e-12};
    double max_step{std::numeric_limits<double>::infinity()};
    double sample_interval{0.0};   // <= 0 selects default_sample_interval(params)
    double overflow_cap{1e100};    // any |component| above this truncates the run
};

// 1/(200 gamma), bounded for undamped or strongly pumped systems.
double default_sample_interval(const SystemParams& params);

enum class TrajectoryStatus { complete, overflow, stopped };

const char* to_string(TrajectoryStatus status);

struct Trajectory {
    std::vector<double> times;
    std::vector<MomentState> states;
    SystemParams params;
    IntegratorControls controls;   // as resolved (sample_interval filled in)
    MomentSystem system;
    TrajectoryStatus status{TrajectoryStatus::complete};
    std::size_t accepted_steps{0};
    std::size_t rejected_steps{0};

    explicit Trajectory(const MomentSystem& sys) : system(sys) {}

    bool empty() const { return times.empty(); }
    std::size_t size() const { return times.size(); }
    double t_begin() const { return times.front(); }
    double t_end() const { return times.back(); }

    // Moment state at an arbitrary time inside the sampled range, re-integrated
    // from the nearest earlier sample at the trajectory tolerances.
    MomentState state_at(double t) const;
};

// Called for each stored sample; returning true ends the run with status "stopped".
using SampleObserver = std::function<bool(double t, const MomentState& state)>;

// Integrates from the thermal equilibrium state at t = 0.
Trajectory integrate(const SystemParams& params, double t_end,
                     const IntegratorControls& controls = {},
                     const SampleObserver& observer = {});

// Integrates an arbitrary system from an arbitrary state.
Trajectory integrate(const SystemParams& params, const MomentSystem& system,
                     const MomentState& initial, double t_begin, double t_end,
                     const IntegratorControls& controls = {},
                     const SampleObserver& observer = {});

// Final state only, no sampling.
MomentState propagate(const MomentSystem& system, const MomentState& initial,
                      double t_begin, double t_end, const IntegratorControls& controls);

} // namespace parament
