// model.cpp — Parameter validation, generator matrices and thermal helpers

#include "parament/model.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace parament {

namespace {

constexpr cplx I{0.0, 1.0};

void require(bool ok, const char* what)
{
    if (!ok) throw std::invalid_argument(what);
}

} // namespace

SystemParams SystemParams::from_quality(double quality, double epsilon, double n_thermal,
                                        double noise_width, double delta)
{
    SystemParams p;
    p.epsilon = epsilon;
    p.n_thermal = n_thermal;
    p.noise_width = noise_width;
    p.delta = delta;
    p.set_quality(quality);
    return p;
}

SystemParams SystemParams::from_gamma(double gamma, double epsilon, double n_thermal,
                                      double noise_width, double delta)
{
    SystemParams p;
    p.epsilon = epsilon;
    p.n_thermal = n_thermal;
    p.noise_width = noise_width;
    p.delta = delta;
    p.set_gamma(gamma);
    return p;
}

void SystemParams::set_quality(double q)
{
    quality = q;
    gamma = std::isinf(q) ? 0.0 : omega / q;
}

void SystemParams::set_gamma(double g)
{
    gamma = g;
    quality = g == 0.0 ? std::numeric_limits<double>::infinity() : omega / g;
}

void SystemParams::validate() const
{
    require(std::isfinite(omega) && omega > 0.0, "omega must be positive and finite");
    require(std::isfinite(gamma) && gamma >= 0.0, "gamma must be non-negative and finite");
    require(quality > 0.0, "quality factor must be positive");
    require(std::isfinite(epsilon) && epsilon >= 0.0, "epsilon must be non-negative and finite");
    require(std::isfinite(delta), "detuning must be finite");
    require(std::isfinite(noise_width) && noise_width >= 0.0,
            "noise width D must be non-negative and finite");
    require(std::isfinite(n_thermal) && n_thermal >= 0.0,
            "thermal occupation n_T must be non-negative and finite");
    if (gamma > 0.0) {
        require(std::abs(quality * gamma - omega) <= 1e-12 * omega,
                "quality and gamma are inconsistent (Q * gamma != omega)");
    } else {
        require(std::isinf(quality), "gamma == 0 requires an infinite quality factor");
    }
}

double MomentState::max_abs() const
{
    double m = 0.0;
    for (const auto& v : u) m = std::max(m, v.cwiseAbs().maxCoeff());
    return m;
}

double MomentState::norm() const
{
    double s = 0.0;
    for (const auto& v : u) s += v.squaredNorm();
    return std::sqrt(s);
}

bool MomentState::finite() const
{
    for (const auto& v : u) {
        for (int k = 0; k < 3; ++k) {
            if (!std::isfinite(v(k).real()) || !std::isfinite(v(k).imag())) return false;
        }
    }
    return true;
}

PhysicalMoments physical_moments(const MomentState& state)
{
    PhysicalMoments m;
    m.nbar = state.at(1, 2).real();
    m.s1 = state.at(3, 1);
    m.s2 = state.at(5, 1);
    m.c = state.at(4, 1);
    m.d = state.at(2, 2);
    return m;
}

Vector3c Generator::forcing(double t) const
{
    if (forcing_decay == 0.0) return forcing_amplitude;
    return forcing_amplitude * std::exp(-forcing_decay * t);
}

Matrix3c coupling_matrix(const SystemParams& p)
{
    const double pump = p.omega * p.epsilon;
    Matrix3c v;
    v << I * p.delta - p.gamma, -I * pump / 2.0, 0.0,
         I * pump / 4.0, -p.gamma, -I * pump / 4.0,
         0.0, I * pump / 2.0, -I * p.delta - p.gamma;
    return v;
}

std::array<int, 3> phase_winding(int n)
{
    switch (n) {
    case 1:
    case 2:
        return {-1, 0, 1};
    case 3:
    case 4:
    case 5:
        return {0, 1, 2};
    default:
        throw std::invalid_argument("moment system index must be in 1..5, got " + std::to_string(n));
    }
}

Vector3c base_forcing(const SystemParams& p)
{
    const double pump = p.omega * p.epsilon;
    return Vector3c(-I * pump / 4.0, cplx(p.gamma * p.n_thermal, 0.0), I * pump / 4.0);
}

Generator build_generator(int n, const SystemParams& params)
{
    const auto winding = phase_winding(n);

    Generator g;
    g.drift = coupling_matrix(params);
    // D * W_n^2 with W_n = i diag(winding)
    for (int k = 0; k < 3; ++k) {
        g.drift(k, k) -= params.noise_width * winding[k] * winding[k];
    }

    if (n == 1) {
        g.forcing_amplitude = base_forcing(params);
    } else if (n == 4) {
        // u_4 = u_1 e^{i phi}: the forcing of u_1 times <e^{i phi(t)}> = e^{-D t}
        g.forcing_amplitude = base_forcing(params);
        g.forcing_decay = params.noise_width;
    }
    return g;
}

GeneratorSet build_generators(const SystemParams& params)
{
    GeneratorSet set;
    for (int n = 1; n <= 5; ++n) set[n - 1] = build_generator(n, params);
    return set;
}

MomentState thermal_initial_state(const SystemParams& params)
{
    MomentState s;
    s.at(1, 2) = params.n_thermal;
    s.at(4, 2) = params.n_thermal;
    return s;
}

double boson_number(double x)
{
    if (!(x > 0.0)) throw std::domain_error("boson_number requires hbar*omega/(k_B T) > 0");
    if (std::isinf(x)) return 0.0;
    return 1.0 / std::expm1(x);
}

double thermal_ratio(double n_thermal)
{
    if (!(n_thermal >= 0.0)) throw std::domain_error("thermal occupation must be non-negative");
    if (n_thermal == 0.0) return std::numeric_limits<double>::infinity();
    return std::log1p(1.0 / n_thermal);
}

std::optional<double> delta_star(const SystemParams& p)
{
    const double pump = p.omega * p.epsilon;
    const double disc = pump * pump - 4.0 * p.gamma * p.gamma;
    if (disc < 0.0) return std::nullopt;
    return std::sqrt(disc) / 2.0;
}

} // namespace parament
