// integrator.cpp — Dormand-Prince 5(4) with Hairer's continuous extension

#include "parament/integrator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace parament {

namespace {

// Butcher tableau of DOPRI5.
constexpr double c2 = 1.0 / 5.0, c3 = 3.0 / 10.0, c4 = 4.0 / 5.0, c5 = 8.0 / 9.0;
constexpr double a21 = 1.0 / 5.0;
constexpr double a31 = 3.0 / 40.0, a32 = 9.0 / 40.0;
constexpr double a41 = 44.0 / 45.0, a42 = -56.0 / 15.0, a43 = 32.0 / 9.0;
constexpr double a51 = 19372.0 / 6561.0, a52 = -25360.0 / 2187.0, a53 = 64448.0 / 6561.0,
                 a54 = -212.0 / 729.0;
constexpr double a61 = 9017.0 / 3168.0, a62 = -355.0 / 33.0, a63 = 46732.0 / 5247.0,
                 a64 = 49.0 / 176.0, a65 = -5103.0 / 18656.0;
constexpr double a71 = 35.0 / 384.0, a73 = 500.0 / 1113.0, a74 = 125.0 / 192.0,
                 a75 = -2187.0 / 6784.0, a76 = 11.0 / 84.0;
constexpr double e1 = 71.0 / 57600.0, e3 = -71.0 / 16695.0, e4 = 71.0 / 1920.0,
                 e5 = -17253.0 / 339200.0, e6 = 22.0 / 525.0, e7 = -1.0 / 40.0;
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

struct DenseStep {
    double t0{0.0};
    double h{0.0};
    std::array<StateVector, 5> r;

    StateVector at(double t) const
    {
        const double s = (t - t0) / h;
        const double s1 = 1.0 - s;
        return r[0] + s * (r[1] + s1 * (r[2] + s * (r[3] + s1 * r[4])));
    }
};

double error_norm(const StateVector& err, const StateVector& y0, const StateVector& y1,
                  double rtol, double atol)
{
    double sum = 0.0;
    for (int i = 0; i < 15; ++i) {
        const double sc = atol + rtol * std::max(std::abs(y0(i)), std::abs(y1(i)));
        const double e = std::abs(err(i)) / sc;
        sum += e * e;
    }
    return std::sqrt(sum / 15.0);
}

double max_abs(const StateVector& y)
{
    return y.cwiseAbs().maxCoeff();
}

void check_controls(const IntegratorControls& c)
{
    if (!(c.rel_tol > 0.0) || !(c.abs_tol > 0.0)) {
        throw std::invalid_argument("integrator tolerances must be positive");
    }
    if (!(c.max_step > 0.0)) throw std::invalid_argument("max_step must be positive");
    if (!(c.overflow_cap > 0.0)) throw std::invalid_argument("overflow cap must be positive");
}

// Integrates y from t0 to t1. on_step(dense, y_new) is called after each accepted
// step and returns true to stop early. Returns false if stopped early.
template <class OnStep>
bool drive(const MomentSystem& sys, StateVector& y, double t0, double t1,
           const IntegratorControls& ctl, std::size_t& accepted, std::size_t& rejected,
           OnStep&& on_step)
{
    if (t1 <= t0) return true;

    StateVector k1, k2, k3, k4, k5, k6, k7, ytmp, ynew, err;
    sys.derivative(t0, y, k1);

    const double span = t1 - t0;
    const double scale = sys.drift_scale();
    double h = std::min({ctl.max_step, span, scale > 0.0 ? 0.05 / scale : span});
    double t = t0;
    double err_prev = 1e-4;
    bool last_rejected = false;

    while (t < t1) {
        if (t + h > t1) h = t1 - t;
        if (h < 1e-13 * std::max(1.0, std::abs(t))) {
            throw NumericalError("integrator step size underflow at t = " + std::to_string(t));
        }

        ytmp = y + h * a21 * k1;
        sys.derivative(t + c2 * h, ytmp, k2);
        ytmp = y + h * (a31 * k1 + a32 * k2);
        sys.derivative(t + c3 * h, ytmp, k3);
        ytmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        sys.derivative(t + c4 * h, ytmp, k4);
        ytmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        sys.derivative(t + c5 * h, ytmp, k5);
        ytmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        const double t_new = (t + h >= t1) ? t1 : t + h;
        sys.derivative(t_new, ytmp, k6);
        ynew = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
        sys.derivative(t_new, ynew, k7);
        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);

        const double en = error_norm(err, y, ynew, ctl.rel_tol, ctl.abs_tol);
        if (!std::isfinite(en)) {
            throw NumericalError("non-finite local error estimate at t = " + std::to_string(t));
        }

        if (en <= 1.0) {
            DenseStep dense;
            dense.t0 = t;
            dense.h = t_new - t;
            const StateVector ydiff = ynew - y;
            const StateVector bspl = h * k1 - ydiff;
            dense.r[0] = y;
            dense.r[1] = ydiff;
            dense.r[2] = bspl;
            dense.r[3] = ydiff - h * k7 - bspl;
            dense.r[4] = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);

            ++accepted;
            y = ynew;
            k1 = k7;
            t = t_new;

            if (on_step(dense, y)) return false;

            // PI step-size controller (Hairer's beta = 0.04)
            double fac = 0.9 * std::pow(std::max(en, 1e-10), -0.7 / 5.0) * std::pow(err_prev, 0.04);
            fac = std::clamp(fac, 0.2, 10.0);
            if (last_rejected) fac = std::min(fac, 1.0);
            h = std::min(h * fac, ctl.max_step);
            err_prev = std::max(en, 1e-4);
            last_rejected = false;
        } else {
            ++rejected;
            h *= std::max(0.2, 0.9 * std::pow(en, -0.2));
            last_rejected = true;
        }
    }
    return true;
}

} // namespace

StateVector to_vector(const MomentState& state)
{
    StateVector y;
    for (int n = 0; n < 5; ++n) y.segment<3>(3 * n) = state.u[n];
    return y;
}

MomentState to_state(const StateVector& y)
{
    MomentState s;
    for (int n = 0; n < 5; ++n) s.u[n] = y.segment<3>(3 * n);
    return s;
}

MomentSystem::MomentSystem(const SystemParams& params) : generators_(build_generators(params)) {}

MomentSystem::MomentSystem(const GeneratorSet& generators) : generators_(generators) {}

MomentSystem MomentSystem::homogeneous(const SystemParams& params)
{
    GeneratorSet g = build_generators(params);
    for (auto& gen : g) {
        gen.forcing_amplitude.setZero();
        gen.forcing_decay = 0.0;
    }
    return MomentSystem(g);
}

void MomentSystem::derivative(double t, const StateVector& y, StateVector& dy) const
{
    for (int n = 0; n < 5; ++n) {
        const Generator& g = generators_[n];
        dy.segment<3>(3 * n).noalias() = g.drift * y.segment<3>(3 * n);
        dy.segment<3>(3 * n) += g.forcing(t);
    }
}

double MomentSystem::drift_scale() const
{
    double m = 0.0;
    for (const auto& g : generators_) m = std::max(m, g.drift.cwiseAbs().maxCoeff());
    return m;
}

double default_sample_interval(const SystemParams& p)
{
    double dt = p.gamma > 0.0 ? 1.0 / (200.0 * p.gamma) : std::numeric_limits<double>::infinity();
    const double pump = p.omega * p.epsilon;
    if (pump > 0.0) dt = std::min(dt, 0.5 / pump);
    if (p.noise_width > 0.0) dt = std::min(dt, 0.01 / p.noise_width);
    if (!std::isfinite(dt)) dt = 1.0 / p.omega;
    return dt;
}

const char* to_string(TrajectoryStatus status)
{
    switch (status) {
    case TrajectoryStatus::complete: return "complete";
    case TrajectoryStatus::overflow: return "overflow";
    case TrajectoryStatus::stopped: return "stopped";
    }
    return "unknown";
}

Trajectory integrate(const SystemParams& params, double t_end, const IntegratorControls& controls,
                     const SampleObserver& observer)
{
    params.validate();
    return integrate(params, MomentSystem(params), thermal_initial_state(params), 0.0, t_end,
                     controls, observer);
}

Trajectory integrate(const SystemParams& params, const MomentSystem& system,
                     const MomentState& initial, double t_begin, double t_end,
                     const IntegratorControls& controls, const SampleObserver& observer)
{
    check_controls(controls);
    if (!(t_end > t_begin)) throw std::invalid_argument("integration horizon must be positive");

    Trajectory traj(system);
    traj.params = params;
    traj.controls = controls;
    if (!(traj.controls.sample_interval > 0.0)) {
        traj.controls.sample_interval = default_sample_interval(params);
    }
    const double ds = traj.controls.sample_interval;

    auto emit = [&](double t, const StateVector& y) {
        MomentState s = to_state(y);
        traj.times.push_back(t);
        traj.states.push_back(s);
        return observer && observer(t, traj.states.back());
    };

    StateVector y = to_vector(initial);
    if (emit(t_begin, y)) {
        traj.status = TrajectoryStatus::stopped;
        return traj;
    }

    std::size_t next = 1;
    const bool finished = drive(
        system, y, t_begin, t_end, traj.controls, traj.accepted_steps, traj.rejected_steps,
        [&](const DenseStep& dense, const StateVector& ynew) {
            const double t_step_end = dense.t0 + dense.h;
            const bool over = max_abs(ynew) > traj.controls.overflow_cap || !ynew.allFinite();
            for (;;) {
                const double ts = t_begin + static_cast<double>(next) * ds;
                if (ts > t_step_end || ts >= t_end) break;
                const StateVector ys = dense.at(ts);
                if (max_abs(ys) > traj.controls.overflow_cap || !ys.allFinite()) {
                    traj.status = TrajectoryStatus::overflow;
                    return true;
                }
                ++next;
                if (emit(ts, ys)) {
                    traj.status = TrajectoryStatus::stopped;
                    return true;
                }
            }
            if (over) {
                traj.status = TrajectoryStatus::overflow;
                return true;
            }
            if (t_step_end >= t_end) {
                if (emit(t_end, ynew)) traj.status = TrajectoryStatus::stopped;
                return true;
            }
            return false;
        });
    (void)finished;
    return traj;
}

MomentState propagate(const MomentSystem& system, const MomentState& initial, double t_begin,
                      double t_end, const IntegratorControls& controls)
{
    check_controls(controls);
    StateVector y = to_vector(initial);
    std::size_t acc = 0, rej = 0;
    drive(system, y, t_begin, t_end, controls, acc, rej,
          [](const DenseStep&, const StateVector&) { return false; });
    return to_state(y);
}

MomentState Trajectory::state_at(double t) const
{
    if (times.empty()) throw std::logic_error("state_at on an empty trajectory");
    if (t < times.front() || t > times.back()) {
        throw std::out_of_range("requested time lies outside the sampled trajectory");
    }
    auto it = std::upper_bound(times.begin(), times.end(), t);
    const std::size_t i = static_cast<std::size_t>(std::distance(times.begin(), it)) - 1;
    if (times[i] == t) return states[i];
    return propagate(system, states[i], times[i], t, controls);
}

} // namespace parament
