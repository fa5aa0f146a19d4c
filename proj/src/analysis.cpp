// analysis.cpp — Entanglement events along a trajectory

#include "parament/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace parament {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// -log2(2 nu_minus) without clipping at zero, so crossings can be bisected.
double raw_negativity(const MomentState& s)
{
    return -std::log2(2.0 * state_negativity(s).nu_minus);
}

double relative_change(double now, double before)
{
    const double scale = std::max(std::abs(now), std::abs(before));
    if (scale == 0.0) return 0.0;
    return std::abs(now - before) / scale;
}

struct Sample {
    double t;
    double e_n;
    double nu;
};

// Value at t - window taken from the nearest stored sample at or before it.
const Sample* lookback(const std::vector<Sample>& hist, double t_ref)
{
    if (hist.empty() || hist.front().t > t_ref) return nullptr;
    auto it = std::upper_bound(hist.begin(), hist.end(), t_ref,
                               [](double t, const Sample& s) { return t < s.t; });
    return &*(it - 1);
}

template <class F>
double bisect_crossing(F&& f, double lo, double hi, double resolution)
{
    // f(lo) < 0 <= f(hi) or f(lo) >= 0 > f(hi); returns the time of the sign change.
    const bool rising = f(hi) >= 0.0;
    while (hi - lo > resolution) {
        const double mid = 0.5 * (lo + hi);
        const bool above = f(mid) >= 0.0;
        if (above == rising) hi = mid;
        else lo = mid;
    }
    return 0.5 * (lo + hi);
}

template <class F>
double golden_max(F&& f, double lo, double hi, double resolution, double& fbest)
{
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = f(x1), f2 = f(x2);
    while (hi - lo > resolution) {
        if (f1 < f2) {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + g * (hi - lo); f2 = f(x2);
        } else {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - g * (hi - lo); f1 = f(x1);
        }
    }
    const double x = 0.5 * (lo + hi);
    fbest = f(x);
    return x;
}

} // namespace

double default_plateau_window(const SystemParams& p)
{
    const double rate = p.gamma + 0.5 * p.omega * p.epsilon;
    return rate > 0.0 ? 5.0 / rate : 5.0 / p.omega;
}

double default_horizon(const SystemParams& p)
{
    return p.gamma > 0.0 ? 100.0 / p.gamma : 1e6 / p.omega;
}

std::string ReportFlags::to_string() const
{
    std::string s;
    auto add = [&](bool on, const char* name) {
        if (!on) return;
        if (!s.empty()) s += '|';
        s += name;
    };
    add(overflow_truncated, "overflow_truncated");
    add(horizon_truncated, "horizon_truncated");
    add(resolution_truncated, "resolution_truncated");
    add(multiple_intervals, "multiple_intervals");
    return s;
}

bool EntanglementReport::unbounded() const
{
    return std::isinf(tau);
}

NegativityResult state_negativity(const MomentState& state)
{
    return log_negativity(covariance_from_moments(physical_moments(state)));
}

EntanglementReport analyze_trajectory(const Trajectory& traj, const AnalysisOptions& opt)
{
    if (traj.empty()) throw std::invalid_argument("analyze_trajectory: empty trajectory");
    if (!(opt.eps_on > 0.0) || !(opt.hysteresis >= 1.0)) {
        throw std::invalid_argument("analyze_trajectory: eps_on must be positive, hysteresis >= 1");
    }

    EntanglementReport rep;
    rep.flags.overflow_truncated = traj.status == TrajectoryStatus::overflow;

    const double eps_off = opt.eps_on / opt.hysteresis;
    const double window = opt.plateau_window > 0.0 ? opt.plateau_window
                                                   : default_plateau_window(traj.params);
    const bool coherent = traj.params.noise_width == 0.0;

    std::vector<Sample> samples;
    samples.reserve(traj.size());
    for (std::size_t i = 0; i < traj.size(); ++i) {
        if (traj.states[i].max_abs() > opt.resolution_cap) {
            rep.flags.resolution_truncated = true;
            break;
        }
        try {
            const NegativityResult r = state_negativity(traj.states[i]);
            samples.push_back({traj.times[i], r.e_n, r.nu_minus});
        } catch (const NumericalError&) {
            rep.flags.resolution_truncated = true;
            break;
        }
    }
    if (samples.empty()) throw NumericalError("analyze_trajectory: no resolvable sample");

    auto raw_at = [&](double t) { return raw_negativity(traj.state_at(t)); };

    bool on = false;
    double onset = 0.0;
    int intervals = 0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const Sample& s = samples[i];
        if (!on && s.e_n >= opt.eps_on) {
            on = true;
            ++intervals;
            onset = i == 0 ? s.t
                           : bisect_crossing([&](double t) { return raw_at(t) - opt.eps_on; },
                                             samples[i - 1].t, s.t, opt.time_resolution);
            if (!rep.t_onset) rep.t_onset = onset;
        } else if (on && s.e_n < eps_off) {
            on = false;
            const double death = bisect_crossing([&](double t) { return raw_at(t) - eps_off; },
                                                 samples[i - 1].t, s.t, opt.time_resolution);
            rep.tau += death - onset;
            rep.t_death = death;
        }
    }
    rep.flags.multiple_intervals = intervals > 1;
    rep.t_final = samples.back().t;
    rep.e_n_final = samples.back().e_n;

    // Peak, refined between the neighbouring samples.
    std::size_t k = 0;
    for (std::size_t i = 1; i < samples.size(); ++i) {
        if (samples[i].e_n > samples[k].e_n) k = i;
    }
    if (samples[k].e_n > 0.0) {
        rep.e_n_max = samples[k].e_n;
        rep.t_peak = samples[k].t;
        if (k > 0 && k + 1 < samples.size()) {
            double best = 0.0;
            const double tp = golden_max(raw_at, samples[k - 1].t, samples[k + 1].t,
                                         opt.time_resolution, best);
            if (best > rep.e_n_max) {
                rep.e_n_max = best;
                rep.t_peak = tp;
            }
        }
    }

    // Plateau of E_N (or of nu_minus when never entangled) over the last window.
    const Sample& last = samples.back();
    bool plateau = false;
    if (last.t - window >= samples.front().t) {
        const NegativityResult ref = state_negativity(traj.state_at(last.t - window));
        plateau = last.e_n > 0.0
                      ? relative_change(last.e_n, ref.e_n) < opt.plateau_rel_change
                      : relative_change(last.nu, ref.nu_minus) < opt.plateau_rel_change;
    }

    if (on) {
        if (coherent) {
            rep.t_death = kInf;
            rep.tau = kInf;
            if (plateau) rep.e_n_steady = last.e_n;
            else rep.flags.horizon_truncated = true;
        } else {
            // Phase noise always ends the entanglement; report what was seen.
            rep.tau += last.t - onset;
            rep.t_death = last.t;
            rep.flags.horizon_truncated = true;
        }
    } else if (coherent && plateau) {
        rep.e_n_steady = last.e_n;
    }
    if (rep.e_n_steady && rep.e_n_max < *rep.e_n_steady) rep.e_n_max = *rep.e_n_steady;
    return rep;
}

EntanglementRun run_entanglement(const SystemParams& params, const IntegratorControls& controls,
                                 const AnalysisOptions& opt)
{
    params.validate();
    const double horizon = opt.horizon > 0.0 ? opt.horizon : default_horizon(params);
    const double window = opt.plateau_window > 0.0 ? opt.plateau_window
                                                   : default_plateau_window(params);
    const double eps_off = opt.eps_on / opt.hysteresis;
    const bool coherent = params.noise_width == 0.0;

    std::vector<Sample> hist;
    bool on = false;
    bool was_on = false;
    double died_at = 0.0;

    auto observer = [&](double t, const MomentState& s) {
        if (s.max_abs() > opt.resolution_cap) return true;
        NegativityResult r;
        try {
            r = state_negativity(s);
        } catch (const NumericalError&) {
            return true;
        }
        hist.push_back({t, r.e_n, r.nu_minus});

        if (!on && r.e_n >= opt.eps_on) {
            on = true;
            was_on = true;
            if (opt.stop_at_onset) return true;
        } else if (on && r.e_n < eps_off) {
            on = false;
            died_at = t;
        }

        const Sample* ref = lookback(hist, t - window);
        if (!ref) return false;
        const bool e_flat = relative_change(r.e_n, ref->e_n) < opt.plateau_rel_change;
        const bool nu_flat = relative_change(r.nu_minus, ref->nu) < opt.plateau_rel_change;

        if (coherent) return on ? e_flat : nu_flat;
        if (was_on && !on) return t - died_at >= window;
        return !was_on && nu_flat;
    };

    Trajectory traj = integrate(params, horizon, controls, observer);
    EntanglementReport rep = analyze_trajectory(traj, opt);
    return {std::move(traj), rep};
}

double steady_state_negativity(const SystemParams& params, const IntegratorControls& controls,
                               const AnalysisOptions& options)
{
    if (params.noise_width != 0.0) {
        throw std::invalid_argument("steady-state negativity is defined only for a coherent pump (D = 0)");
    }
    AnalysisOptions opt = options;
    opt.stop_at_onset = false;
    const EntanglementRun run = run_entanglement(params, controls, opt);
    if (!run.report.e_n_steady) {
        throw NumericalError("no E_N plateau before the run ended (partial value " +
                             std::to_string(run.report.e_n_final) + " at t = " +
                             std::to_string(run.report.t_final) + ")");
    }
    return *run.report.e_n_steady;
}

} // namespace parament
