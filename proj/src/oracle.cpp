// oracle.cpp — Pathwise Monte-Carlo of the moment equations under sampled pump phases.
//
// Built only from V, the phase windings and the phase-free forcing of u_1. The
// D W_n^2 drift and the e^{-D t} forcing factor of the averaged equations must
// come out of the ensemble average; nothing here refers to them.

#include "parament/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "parament/parallel.hpp"

namespace parament {

namespace {

constexpr std::size_t kChunk = 64;   // paths per reduction block, fixed for reproducibility
constexpr std::size_t kValues = 30;  // 15 complex components as real/imag pairs

struct StepMaps {
    Matrix3c propagator;   // exp(V dt)
    Matrix3c integral;     // int_0^dt exp(V s) ds
};

StepMaps step_maps(const Matrix3c& v, double dt)
{
    Eigen::Matrix<cplx, 6, 6> aug = Eigen::Matrix<cplx, 6, 6>::Zero();
    aug.topLeftCorner<3, 3>() = v * dt;
    aug.topRightCorner<3, 3>() = Matrix3c::Identity() * dt;
    const Eigen::Matrix<cplx, 6, 6> e = aug.exp();
    return {e.topLeftCorner<3, 3>(), e.topRightCorner<3, 3>()};
}

struct Grid {
    std::size_t steps;
    double dt;
    std::vector<std::size_t> marks;   // step indices of the checkpoints
};

Grid make_grid(double dt, double t_end, const std::vector<double>& checkpoints)
{
    if (!(t_end > 0.0) || !std::isfinite(t_end)) throw std::invalid_argument("oracle: t_end must be positive");
    Grid g;
    g.steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(t_end / dt)));
    g.dt = t_end / static_cast<double>(g.steps);
    for (double t : checkpoints) {
        if (!(t > 0.0) || t > t_end * (1.0 + 1e-12)) {
            throw std::invalid_argument("oracle: checkpoints must lie in (0, t_end]");
        }
        const auto k = static_cast<std::size_t>(std::llround(t / g.dt));
        g.marks.push_back(std::clamp<std::size_t>(k, 1, g.steps));
    }
    std::sort(g.marks.begin(), g.marks.end());
    g.marks.erase(std::unique(g.marks.begin(), g.marks.end()), g.marks.end());
    return g;
}

std::vector<double> default_checkpoints(double t_end)
{
    std::vector<double> c;
    for (int i = 1; i <= 10; ++i) c.push_back(t_end * i / 10.0);
    return c;
}

// Walks one realization; calls record(mark index, state, phi) at each checkpoint.
template <class Record>
void walk(const SystemParams& p, const StepMaps& maps, const Grid& g, std::uint64_t seed, Record&& record)
{
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> increment(0.0, std::sqrt(2.0 * p.noise_width * g.dt));
    const Vector3c r1 = base_forcing(p);
    const Vector3c g_r1 = maps.integral * r1;
    std::array<std::array<int, 3>, 5> winding;
    for (int n = 1; n <= 5; ++n) winding[n - 1] = phase_winding(n);

    MomentState s = thermal_initial_state(p);   // phi(0) = 0
    double phi = 0.0;
    std::size_t next = 0;
    for (std::size_t step = 1; step <= g.steps; ++step) {
        const double dphi = p.noise_width > 0.0 ? increment(rng) : 0.0;
        phi += dphi;
        const cplx z = std::polar(1.0, dphi);
        const cplx kick[4] = {std::conj(z), 1.0, z, z * z};   // windings -1, 0, 1, 2
        const cplx e_phi = std::polar(1.0, phi);
        for (int n = 0; n < 5; ++n) {
            Vector3c& u = s.u[n];
            for (int k = 0; k < 3; ++k) u(k) *= kick[winding[n][k] + 1];
            u = (maps.propagator * u).eval();
            if (n == 0) u += g_r1;                  // u_1: forcing carries no phase
            else if (n == 3) u += g_r1 * e_phi;     // u_4 = u_1 e^{i phi}
        }
        while (next < g.marks.size() && g.marks[next] == step) record(next++, s, phi);
    }
}

// Per-block running mean / M2, merged in block order.
struct Moments {
    std::size_t count{0};
    std::vector<double> mean, m2;

    explicit Moments(std::size_t n = 0) : mean(n, 0.0), m2(n, 0.0) {}

    void add(std::size_t i, double x, std::size_t count_after)
    {
        const double d = x - mean[i];
        mean[i] += d / static_cast<double>(count_after);
        m2[i] += d * (x - mean[i]);
    }

    void merge(const Moments& o)
    {
        if (o.count == 0) return;
        if (count == 0) {
            *this = o;
            return;
        }
        const double na = static_cast<double>(count), nb = static_cast<double>(o.count);
        const double n = na + nb;
        for (std::size_t i = 0; i < mean.size(); ++i) {
            const double d = o.mean[i] - mean[i];
            mean[i] += d * nb / n;
            m2[i] += o.m2[i] + d * d * na * nb / n;
        }
        count += o.count;
    }
};

double se_of(const Moments& m, std::size_t i)
{
    if (m.count < 2) return 0.0;
    const double n = static_cast<double>(m.count);
    return std::sqrt(std::max(0.0, m.m2[i]) / (n - 1.0) / n);
}

const char* kPartNames[2] = {"re", "im"};

} // namespace

double default_oracle_step(const SystemParams& p)
{
    double dt = 1.0 / p.omega;
    if (p.noise_width > 0.0) dt = std::min(dt, 1e-2 / p.noise_width);
    if (p.epsilon > 0.0) dt = std::min(dt, 2e-2 / (p.omega * p.epsilon));
    if (p.gamma > 0.0) dt = std::min(dt, 0.1 / p.gamma);
    return dt;
}

void check_oracle_step(const SystemParams& p, double dt)
{
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("oracle: dt must be positive");
    const double slack = 1.0 + 1e-12;
    if (0.5 * p.omega * p.epsilon * dt > 1e-2 * slack) {
        throw std::invalid_argument("oracle: step too large, need (omega eps / 2) dt <= 1e-2");
    }
    if (p.noise_width * dt > 1e-2 * slack) {
        throw std::invalid_argument("oracle: step too large, need D dt <= 1e-2");
    }
}

std::uint64_t path_seed(std::uint64_t master, std::uint64_t index)
{
    std::uint64_t z = master + index + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

PathRecord simulate_realization(const SystemParams& params, std::uint64_t seed, double dt,
                                double t_end, const std::vector<double>& checkpoints)
{
    params.validate();
    check_oracle_step(params, dt);
    const Grid g = make_grid(dt, t_end, checkpoints);
    const StepMaps maps = step_maps(coupling_matrix(params), g.dt);

    PathRecord rec;
    rec.times.push_back(0.0);
    rec.states.push_back(thermal_initial_state(params));
    rec.phases.push_back(0.0);
    walk(params, maps, g, seed, [&](std::size_t i, const MomentState& s, double phi) {
        rec.times.push_back(static_cast<double>(g.marks[i]) * g.dt);
        rec.states.push_back(s);
        rec.phases.push_back(phi);
    });
    return rec;
}

PathEnsemble run_ensemble(const SystemParams& params, const OracleOptions& opt)
{
    params.validate();
    if (opt.n_paths < 2) throw std::invalid_argument("oracle: need at least 2 paths");
    const double dt = opt.dt > 0.0 ? opt.dt : default_oracle_step(params);
    check_oracle_step(params, dt);
    const Grid g = make_grid(dt, opt.t_end, opt.checkpoints.empty() ? default_checkpoints(opt.t_end)
                                                                   : opt.checkpoints);
    const StepMaps maps = step_maps(coupling_matrix(params), g.dt);
    const std::size_t width = g.marks.size() * kValues;

    const std::size_t blocks = (opt.n_paths + kChunk - 1) / kChunk;
    std::vector<Moments> block(blocks, Moments(width));
    parallel_for(blocks, opt.threads, [&](std::size_t b) {
        Moments& m = block[b];
        const std::size_t first = b * kChunk;
        const std::size_t last = std::min(opt.n_paths, first + kChunk);
        for (std::size_t path = first; path < last; ++path) {
            const std::size_t count = path - first + 1;
            walk(params, maps, g, path_seed(opt.master_seed, path),
                 [&](std::size_t c, const MomentState& s, double) {
                     for (int n = 0; n < 5; ++n)
                         for (int k = 0; k < 3; ++k) {
                             const std::size_t base = c * kValues + (n * 3 + k) * 2;
                             m.add(base, s.u[n](k).real(), count);
                             m.add(base + 1, s.u[n](k).imag(), count);
                         }
                 });
            m.count = count;
        }
    });

    Moments total(width);
    for (const Moments& m : block) total.merge(m);

    PathEnsemble ens;
    ens.n_paths = opt.n_paths;
    ens.dt = g.dt;
    ens.master_seed = opt.master_seed;
    for (std::size_t c = 0; c < g.marks.size(); ++c) {
        ens.times.push_back(static_cast<double>(g.marks[c]) * g.dt);
        MomentState mean, se;
        for (int n = 0; n < 5; ++n)
            for (int k = 0; k < 3; ++k) {
                const std::size_t base = c * kValues + (n * 3 + k) * 2;
                mean.u[n](k) = cplx(total.mean[base], total.mean[base + 1]);
                se.u[n](k) = cplx(se_of(total, base), se_of(total, base + 1));
            }
        ens.mean.push_back(mean);
        ens.std_error.push_back(se);
    }
    return ens;
}

OracleReport mc_compare(const SystemParams& params, const OracleOptions& opt)
{
    OracleReport rep;
    rep.ensemble = run_ensemble(params, opt);
    const PathEnsemble& ens = rep.ensemble;

    IntegratorControls ctl = opt.ode_controls;
    const Trajectory traj = integrate(params, ens.times.back(), ctl);
    if (traj.status != TrajectoryStatus::complete) {
        throw NumericalError("oracle: averaged ODE did not reach t_end (" +
                             std::string(to_string(traj.status)) + ")");
    }
    for (double t : ens.times) rep.ode.push_back(traj.state_at(t));

    for (std::size_t c = 0; c < ens.times.size(); ++c) {
        for (int n = 0; n < 5; ++n) {
            // Scale of this system at this checkpoint, for deciding what counts as zero.
            const double scale = std::max(rep.ode[c].u[n].cwiseAbs().maxCoeff(),
                                    ens.mean[c].u[n].cwiseAbs().maxCoeff());
            for (int k = 0; k < 3; ++k) {
                for (int part = 0; part < 2; ++part) {
                    PairCheck pc;
                    pc.t = ens.times[c];
                    pc.n = n + 1;
                    pc.k = k + 1;
                    pc.part = part == 0 ? 'r' : 'i';
                    const cplx mc = ens.mean[c].u[n](k), ode = rep.ode[c].u[n](k),
                               se = ens.std_error[c].u[n](k);
                    pc.mc = part == 0 ? mc.real() : mc.imag();
                    pc.ode = part == 0 ? ode.real() : ode.imag();
                    pc.se = part == 0 ? se.real() : se.imag();
                    const double diff = std::abs(pc.mc - pc.ode);
                    const double floor = 1e-9 * scale;   // rounding level of this system
                    const bool trivial = std::max({std::abs(pc.mc), std::abs(pc.ode), pc.se}) <= floor;
                    if (trivial) {
                        pc.z = 0.0;
                        pc.passed = true;
                    } else {
                        if (diff <= floor) pc.z = 0.0;
                        else pc.z = pc.se > 0.0 ? diff / pc.se : std::numeric_limits<double>::infinity();
                        pc.passed = pc.z <= opt.z_threshold;
                        ++rep.nontrivial;
                        if (pc.passed) ++rep.passed;
                        if (pc.z > rep.worst_z || rep.nontrivial == 1) {
                            rep.worst_z = pc.z;
                            rep.worst = pc;
                        }
                        if (!pc.passed) {
                            const std::string name = "u" + std::to_string(pc.n) + "[" +
                                                     std::to_string(pc.k) + "]." + kPartNames[part];
                            if (std::find(rep.offenders.begin(), rep.offenders.end(), name) ==
                                rep.offenders.end()) {
                                rep.offenders.push_back(name);
                            }
                        }
                    }
                    rep.pairs.push_back(pc);
                }
            }
        }
    }
    rep.pass_fraction = rep.nontrivial > 0 ? static_cast<double>(rep.passed) / rep.nontrivial : 1.0;
    rep.pass = rep.pass_fraction >= opt.pass_fraction;
    return rep;
}

PhaseFactorEstimate sample_phase_factor(double noise_width, double t, int k, std::size_t n_paths,
                                        double dt, std::uint64_t master_seed)
{
    if (!(noise_width >= 0.0) || !(t > 0.0) || !(dt > 0.0) || n_paths < 2) {
        throw std::invalid_argument("sample_phase_factor: need D >= 0, t > 0, dt > 0, n_paths >= 2");
    }
    const std::size_t steps = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(t / dt)));
    const double h = t / static_cast<double>(steps);
    const std::size_t blocks = (n_paths + kChunk - 1) / kChunk;
    std::vector<Moments> block(blocks, Moments(2));
    for (std::size_t b = 0; b < blocks; ++b) {
        Moments& m = block[b];
        const std::size_t first = b * kChunk;
        const std::size_t last = std::min(n_paths, first + kChunk);
        for (std::size_t path = first; path < last; ++path) {
            std::mt19937_64 rng(path_seed(master_seed, path));
            std::normal_distribution<double> increment(0.0, std::sqrt(2.0 * noise_width * h));
            double phi = 0.0;
            for (std::size_t s = 0; s < steps; ++s) phi += noise_width > 0.0 ? increment(rng) : 0.0;
            const std::size_t count = path - first + 1;
            m.add(0, std::cos(k * phi), count);
            m.add(1, std::sin(k * phi), count);
            m.count = count;
        }
    }
    Moments total(2);
    for (const Moments& m : block) total.merge(m);
    return {cplx(total.mean[0], total.mean[1]), se_of(total, 0), se_of(total, 1)};
}

} // namespace parament
