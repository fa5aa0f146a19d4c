// acceptance.cpp — One PASS/FAIL line per acceptance criterion, tolerances pinned below.
//
// Exits nonzero if any criterion fails. Slow: the boundary grid and the 1e4-path
// ensemble dominate.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "gaussian_states.hpp"
#include "parament/analysis.hpp"
#include "parament/fit.hpp"
#include "parament/negativity.hpp"
#include "parament/oracle.hpp"
#include "parament/parallel.hpp"
#include "parament/sweep.hpp"

using namespace parament;

namespace {

// pinned tolerances
constexpr double kThresholdTol = 0.02;      // 1, 2
constexpr double kBisectionSeconds = 60.0;  // 1, 2
constexpr double kFormulaTol = 0.15;        // 4
constexpr double kTauPeakFactor = 1.5;      // 5: argmax of tau no further than this from eps0(D)
constexpr double kOraclePass = 0.95;        // 6
constexpr double kTmsvTol = 1e-8;           // 7
constexpr double kRouteTol = 1e-10;         // 7
constexpr double kRotationTol = 1e-12;      // 7
constexpr double kDecayTol = 1e-8;          // 8
constexpr double kGrowthTol = 0.01;         // 8

constexpr double kQ = 5000.0;

SystemParams params(double eps, double n_t, double noise_width)
{
    return SystemParams::from_quality(kQ, eps, n_t, noise_width);
}

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

double rel(double got, double want) { return std::abs(got - want) / std::abs(want); }

struct Outcome {
    bool pass{true};
    std::ostringstream detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail << " [violated: " << what << "]";
        }
    }
};

int failures = 0;

void report(int id, const char* name, const std::function<void(Outcome&)>& body)
{
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
        body(o);
    } catch (const std::exception& e) {
        o.pass = false;
        o.detail << " [exception: " << e.what() << "]";
    }
    if (!o.pass) ++failures;
    std::printf("%s %d %s (%.1f s):%s\n", o.pass ? "PASS" : "FAIL", id, name, seconds_since(t0),
                o.detail.str().c_str());
    std::fflush(stdout);
}

void coherent_threshold(Outcome& o)
{
    for (double n_t : {5.0, 10.0, 20.0}) {
        const auto t0 = std::chrono::steady_clock::now();
        const BoundaryResult r = find_boundary(params(1.6e-2, n_t, 0.0), "eps", 1e-3, 0.1);
        const double secs = seconds_since(t0);
        const double want = 4.0 * n_t / kQ;
        o.detail << " nT=" << n_t << ": eps0=" << r.value << " (want " << want << ", " << secs << " s)";
        o.require(rel(r.value, want) <= kThresholdTol, "eps0 within 2%");
        o.require(secs < kBisectionSeconds, "bisection under a minute");
    }
}

void limiting_boson_number(Outcome& o)
{
    const auto t0 = std::chrono::steady_clock::now();
    const BoundaryResult r = find_boundary(params(1.6e-2, 10.0, 0.0), "nT", 1e-3, 40.0);
    const double secs = seconds_since(t0);
    o.detail << " nT0=" << r.value << " (" << secs << " s)";
    o.require(rel(r.value, 20.0) <= kThresholdTol, "nT0 = 20 within 2%");
    o.require(secs < kBisectionSeconds, "bisection under a minute");
}

// E_N samples are monotone up to the peak, in the sense that no sample before it
// falls below an earlier one by more than rounding.
bool rises_to(const Trajectory& tr, double t_stop)
{
    double best = 0.0;
    for (std::size_t i = 0; i < tr.size() && tr.times[i] <= t_stop; ++i) {
        const double e = state_negativity(tr.states[i]).e_n;
        if (e < best - 1e-9 * std::max(1.0, best)) return false;
        best = std::max(best, e);
    }
    return true;
}

void fig1_shape(Outcome& o)
{
    const EntanglementRun coh = run_entanglement(params(1.6e-2, 10.0, 0.0));
    const EntanglementReport& c = coh.report;
    o.detail << " D=0: onset=" << (c.t_onset ? *c.t_onset : -1.0)
             << " steady=" << (c.e_n_steady ? *c.e_n_steady : -1.0);
    o.require(c.t_onset.has_value() && *c.t_onset > 0.0, "D=0 delayed onset");
    o.require(c.e_n_steady.has_value() && *c.e_n_steady > 0.0, "D=0 plateau > 0");
    o.require(c.unbounded(), "D=0 unbounded lifetime");
    o.require(rises_to(coh.trajectory, coh.trajectory.t_end()), "D=0 monotone rise");

    double tau[2] = {0.0, 0.0};
    const double ds[2] = {1e-10, 1e-8};
    for (int i = 0; i < 2; ++i) {
        const EntanglementRun run = run_entanglement(params(1.6e-2, 10.0, ds[i]));
        const EntanglementReport& r = run.report;
        tau[i] = r.tau;
        const double peak = r.t_peak.value_or(-1.0);
        o.detail << " D=" << ds[i] << ": onset=" << r.t_onset.value_or(-1.0) << " peak=" << peak
                 << " death=" << r.t_death << " tau=" << r.tau;
        o.require(r.t_onset.has_value(), "onset with phase noise");
        o.require(std::isfinite(r.t_death) && peak > *r.t_onset && peak < r.t_death, "interior peak then death");
        o.require(rises_to(run.trajectory, peak), "rise before the peak");
        o.require(!r.flags.horizon_truncated && !r.flags.resolution_truncated, "death resolved");
    }
    o.require(tau[1] < tau[0] && std::isfinite(tau[0]), "tau(1e-8) < tau(1e-10) < inf");
}

void formula_validity(Outcome& o)
{
    const Axis axis{"D", 1e-10, 1e-6, 9, Spacing::log};
    const std::vector<double> ds = axis.values();
    std::vector<double> sim(ds.size());
    parallel_for(ds.size(), 0, [&](std::size_t i) {
        sim[i] = find_boundary(params(1.6e-2, 10.0, ds[i]), "nT", 0.5, 40.0).value;
    });
    double worst = 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
        const double f = eval_boundary(ds[i], 1.6e-2, kQ);
        const double e = std::abs(sim[i] - f) / sim[i];
        worst = std::max(worst, e);
        o.detail << " D=" << ds[i] << ": " << sim[i] << " vs " << f << ";";
    }
    o.detail << " worst=" << worst;
    o.require(worst <= kFormulaTol, "within 15% of the boundary formula");
}

void fig3_monotonicity(Outcome& o)
{
    const double d = 1e-10;
    const std::vector<double> factors{1.02, 1.05, 1.1, 1.2, 1.3, 1.4, 1.6, 1.8, 2.0, 2.5, 3.0};
    for (double n_t : {10.0, 20.0, 30.0}) {
        const double eps0 = find_boundary(params(1.6e-2, n_t, d), "eps", 1e-3, 0.2).value;
        std::vector<EntanglementReport> reps(factors.size());
        parallel_for(factors.size(), 0, [&](std::size_t i) {
            reps[i] = run_entanglement(params(eps0 * factors[i], n_t, d)).report;
        });
        std::size_t arg = 0;
        for (std::size_t i = 0; i < reps.size(); ++i)
            if (reps[i].tau > reps[arg].tau) arg = i;
        o.detail << " nT=" << n_t << ": eps0=" << eps0 << " tau peak at " << factors[arg] << " eps0;";
        bool rising = true, falling = true, resolved = true;
        for (std::size_t i = 0; i < reps.size(); ++i) {
            resolved = resolved && reps[i].entangled() && std::isfinite(reps[i].tau) &&
                       !reps[i].flags.horizon_truncated && !reps[i].flags.resolution_truncated;
            if (i == 0) continue;
            rising = rising && reps[i].e_n_max > reps[i - 1].e_n_max;
            if (i > arg) falling = falling && reps[i].tau <= reps[i - 1].tau;
        }
        if (!resolved || !rising || !falling) {
            for (std::size_t i = 0; i < reps.size(); ++i)
                o.detail << " (" << factors[i] << ": E_Nmax=" << reps[i].e_n_max << " tau=" << reps[i].tau
                         << " " << reps[i].flags.to_string() << ")";
        }
        o.require(resolved, "every sample entangled with a resolved death");
        o.require(rising, "E_Nmax increasing in eps");
        o.require(factors[arg] <= kTauPeakFactor, "tau peaks close to eps0(D)");
        o.require(falling, "tau decreasing beyond its peak");
    }
}

void oracle_equivalence(Outcome& o)
{
    OracleOptions opt;
    opt.n_paths = 10000;
    opt.t_end = 2e4;
    const OracleReport r = mc_compare(params(1.6e-2, 10.0, 1e-4), opt);
    o.detail << " pairs=" << r.nontrivial << " passed=" << r.passed << " fraction=" << r.pass_fraction
             << " worst_z=" << r.worst_z;
    o.require(r.nontrivial > 0, "nontrivial comparisons");
    o.require(r.pass_fraction >= kOraclePass, "95% of pairs within 3 SE");
}

void negativity_suite(Outcome& o)
{
    using namespace parament::testing;
    PhysicalMoments thermal;
    thermal.nbar = 10.0;
    o.require(log_negativity(covariance_from_moments(thermal)).e_n == 0.0, "thermal E_N = 0");

    double tmsv = 0.0;
    for (double r : {0.1, 0.5, 1.0})
        tmsv = std::max(tmsv, std::abs(log_negativity(covariance_from_moments(tmsv_moments(r))).e_n -
                                       2.0 * r / std::log(2.0)));
    o.require(tmsv <= kTmsvTol, "TMSV E_N = 2r/ln2");

    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI);
    double route = 0.0, rot = 0.0;
    for (int i = 0; i < 1000; ++i) {
        const CovarianceMatrix cov = random_physical(rng);
        const double e = log_negativity(cov).e_n;
        route = std::max(route, std::abs(e - log_negativity_from_spectrum(symplectic_spectrum(cov, true))));
        CovarianceMatrix turned;
        const Eigen::Matrix4d l = local(rot2(ang(rng)), rot2(ang(rng)));
        turned.sigma = l * cov.sigma * l.transpose();
        rot = std::max(rot, std::abs(log_negativity(turned).e_n - e));
    }
    o.detail << " tmsv=" << tmsv << " route=" << route << " rotation=" << rot;
    o.require(route <= kRouteTol, "invariant and spectrum routes agree");
    o.require(rot <= kRotationTol, "local-rotation invariance");
}

void integrator_closed_forms(Outcome& o)
{
    // no pump: thermal state stays put
    const SystemParams still = params(0.0, 10.0, 1e-4);
    const Trajectory a = integrate(still, 1e5);
    double drift = 0.0;
    for (const MomentState& s : a.states) drift = std::max(drift, std::abs(s.at(1, 2) - cplx(10.0)) / 10.0);
    o.require(drift <= kDecayTol, "eps = 0 constancy");

    // undamped, unpumped: u_4[2] = n_T e^{-D t}
    const double d = 1e-4;
    const Trajectory b = integrate(SystemParams::from_gamma(0.0, 0.0, 10.0, d), 5e4);
    double decay = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
        const double exact = 10.0 * std::exp(-d * b.times[i]);
        decay = std::max(decay, std::abs(b.states[i].at(4, 2) - exact) / exact);
    }
    o.require(decay <= kDecayTol, "u_4[2] = n_T e^{-D t}");

    // above threshold at D = 0 the moments grow at omega eps / 2 - gamma
    const SystemParams pumped = params(1.6e-2, 10.0, 0.0);
    const Trajectory c = integrate(pumped, 4000.0);
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int n = 0;
    for (std::size_t i = 0; i < c.size(); ++i) {
        if (c.times[i] < 2000.0) continue;
        const double x = c.times[i], y = std::log(c.states[i].norm());
        sx += x; sy += y; sxx += x * x; sxy += x * y;
        ++n;
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double want = pumped.omega * pumped.epsilon / 2.0 - pumped.gamma;
    o.detail << " constancy=" << drift << " decay=" << decay << " growth=" << slope << " (want " << want << ")";
    o.require(rel(slope, want) <= kGrowthTol, "growth rate within 1%");
}

} // namespace

int main()
{
    report(1, "coherent-pump threshold eps0 = 4 nT / Q", coherent_threshold);
    report(2, "limiting boson number nT0 = 20", limiting_boson_number);
    report(3, "onset, plateau and finite lifetimes", fig1_shape);
    report(4, "boundary formula within 15% for D <= 1e-6", formula_validity);
    report(5, "E_Nmax and tau versus eps at D = 1e-10", fig3_monotonicity);
    report(6, "Monte-Carlo oracle matches the averaged equations", oracle_equivalence);
    report(7, "negativity unit suite", negativity_suite);
    report(8, "closed-form integrator checks", integrator_closed_forms);
    std::printf("%d of 8 criteria failed\n", failures);
    return failures == 0 ? 0 : 1;
}
