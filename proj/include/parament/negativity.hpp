// negativity.hpp — Two-mode covariance matrix and Gaussian logarithmic negativity

#pragma once

#include <array>

#include <Eigen/Dense>

#include "parament/model.hpp"

namespace parament {

// Covariance over the quadratures (q1, p1, q2, p2), q = (A + A^+)/sqrt2,
// p = i(A^+ - A)/sqrt2, so the vacuum has variance 1/2.
struct CovarianceMatrix {
    Eigen::Matrix4d sigma{Eigen::Matrix4d::Identity() * 0.5};

    Eigen::Matrix2d alpha() const { return sigma.block<2, 2>(0, 0); }
    Eigen::Matrix2d beta() const { return sigma.block<2, 2>(2, 2); }
    Eigen::Matrix2d gamma_block() const { return sigma.block<2, 2>(0, 2); }
};

struct SymplecticInvariants {
    double A{0.0};       // det alpha
    double B{0.0};       // det beta
    double C{0.0};       // det gamma
    double Sigma{0.0};   // det sigma
};

struct NegativityResult {
    double e_n{0.0};
    double nu_minus{0.5};
    SymplecticInvariants invariants;
};

// Symplectic form for the (q1, p1, q2, p2) ordering: J = J2 (+) J2, J2 = [[0, 1], [-1, 0]].
const Eigen::Matrix4d& symplectic_form();

// Rotating-frame covariance of a zero-mean state with the given second moments.
CovarianceMatrix covariance_from_moments(const PhysicalMoments& m);

// Partial transpose on mode 2: p2 -> -p2.
CovarianceMatrix partial_transpose(const CovarianceMatrix& cov);

SymplecticInvariants symplectic_invariants(const CovarianceMatrix& cov);

// Smallest symplectic eigenvalue of the partial transpose from the invariants,
// in the rationalized form nu^2 = 2 Sigma / (Dt + sqrt(Dt^2 - 4 Sigma)), Dt = A + B - 2C.
// Throws NumericalError if Dt^2 < 4 Sigma beyond tolerance.
NegativityResult log_negativity(const CovarianceMatrix& cov);

// Moduli of the eigenvalues of -iJ sigma (or of the partial transpose), one per
// degenerate pair, sorted ascending.
std::array<double, 2> symplectic_spectrum(const CovarianceMatrix& cov, bool partial_transpose);

// E_N = -sum over the spectrum of log2(min(1, 2 nu)).
double log_negativity_from_spectrum(const std::array<double, 2>& spectrum);

// Smallest eigenvalue of the Hermitian matrix sigma + (i/2) J; >= 0 for physical states.
double uncertainty_margin(const CovarianceMatrix& cov);

// Uncertainty relation holds to tolerance tol * max(1, |sigma|).
bool is_physical(const CovarianceMatrix& cov, double tol = 1e-9);

} // namespace parament
