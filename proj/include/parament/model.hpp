// model.hpp — Parameters, averaged moment state and constant generators of the
// phase-averaged second-moment equations for two parametrically coupled oscillators.

#pragma once

#include <array>
#include <complex>
#include <optional>
#include <stdexcept>

#include <Eigen/Dense>

namespace parament {

using cplx = std::complex<double>;
using Vector3c = Eigen::Vector3cd;
using Matrix3c = Eigen::Matrix3cd;

// Raised when an integration or eigen-solve cannot produce a meaningful result.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// All rates, detunings and times are in units of the oscillator frequency omega.
struct SystemParams {
    double omega{1.0};
    double quality{5000.0};      // Q = omega / gamma (infinite when gamma == 0)
    double gamma{2.0e-4};        // damping rate
    double epsilon{0.0};         // pump amplitude
    double delta{0.0};           // detuning Omega - 2 omega
    double noise_width{0.0};     // pump phase diffusion constant D
    double n_thermal{0.0};       // mean equilibrium boson number of each bath

    // Builds a parameter set from the quality factor; gamma is derived.
    static SystemParams from_quality(double quality, double epsilon, double n_thermal,
                                     double noise_width = 0.0, double delta = 0.0);
    // Builds a parameter set from the damping rate; quality is derived (infinite for gamma == 0).
    static SystemParams from_gamma(double gamma, double epsilon, double n_thermal,
                                   double noise_width = 0.0, double delta = 0.0);

    void set_quality(double q);
    void set_gamma(double g);

    // Throws std::invalid_argument naming the first violated constraint.
    void validate() const;
};

// The five averaged 3-vectors <u_1> .. <u_5>. Index 0 holds u_1.
//   u_1 = (A1 A2 e^{-i phi}, (A1^+A1 + A2^+A2)/2, A1^+A2^+ e^{i phi})
//   u_2 = (A2^2 e^{-i phi},  A1^+A2,              A1^+2 e^{i phi})
//   u_3 = (A1^2,             A1^+A2 e^{i phi},    A1^+2 e^{2 i phi})
//   u_4 = u_1 e^{i phi},     u_5 = u_2 e^{i phi}
struct MomentState {
    std::array<Vector3c, 5> u{Vector3c::Zero(), Vector3c::Zero(), Vector3c::Zero(),
                              Vector3c::Zero(), Vector3c::Zero()};

    // 1-based access matching the u_n[k] naming.
    cplx& at(int n, int k) { return u.at(n - 1)(k - 1); }
    const cplx& at(int n, int k) const { return u.at(n - 1)(k - 1); }

    double max_abs() const;
    double norm() const;
    bool finite() const;
};

// The second moments entering the two-mode covariance matrix.
struct PhysicalMoments {
    double nbar{0.0};   // <A_j^+ A_j>, equal for both oscillators
    cplx s1{0.0};       // <A_1^2>
    cplx s2{0.0};       // <A_2^2>
    cplx c{0.0};        // <A_1 A_2>
    cplx d{0.0};        // <A_1^+ A_2>
};

PhysicalMoments physical_moments(const MomentState& state);

// Drift V + D W_n^2 and forcing <r_n>(t) = amplitude * exp(-decay * t) of system n.
struct Generator {
    Matrix3c drift{Matrix3c::Zero()};
    Vector3c forcing_amplitude{Vector3c::Zero()};
    double forcing_decay{0.0};

    Vector3c forcing(double t) const;
};

using GeneratorSet = std::array<Generator, 5>;

// The constant coupling matrix V.
Matrix3c coupling_matrix(const SystemParams& params);

// Diagonal of W_n / i, i.e. the phase winding number of each component of u_n.
std::array<int, 3> phase_winding(int n);

// Forcing of u_1, which carries no phase factor.
Vector3c base_forcing(const SystemParams& params);

Generator build_generator(int n, const SystemParams& params);
GeneratorSet build_generators(const SystemParams& params);

// Equilibrium uncorrelated start with phi(0) = 0.
MomentState thermal_initial_state(const SystemParams& params);

// Bose-Einstein occupation 1/(e^x - 1) for x = hbar omega / k_B T.
double boson_number(double x);
// Inverse of boson_number: x = ln(1 + 1/n_T). Returns +inf for n_T == 0.
double thermal_ratio(double n_thermal);

// Half-width of the parametric instability band in detuning.
// Empty when omega*epsilon < 2 gamma (no instability).
std::optional<double> delta_star(const SystemParams& params);

} // namespace parament
