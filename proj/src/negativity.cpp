// negativity.cpp — Covariance assembly and the two routes to the symplectic spectrum

#include "parament/negativity.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace parament {

namespace {

bool finite(cplx z)
{
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

double det2(const Eigen::Matrix2d& m)
{
    return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
}

} // namespace

const Eigen::Matrix4d& symplectic_form()
{
    static const Eigen::Matrix4d J = [] {
        Eigen::Matrix4d j = Eigen::Matrix4d::Zero();
        j(0, 1) = 1.0;
        j(1, 0) = -1.0;
        j(2, 3) = 1.0;
        j(3, 2) = -1.0;
        return j;
    }();
    return J;
}

CovarianceMatrix covariance_from_moments(const PhysicalMoments& m)
{
    if (!std::isfinite(m.nbar) || !finite(m.s1) || !finite(m.s2) || !finite(m.c) || !finite(m.d)) {
        throw std::invalid_argument("covariance_from_moments: non-finite moment");
    }

    const double diag = m.nbar + 0.5;
    Eigen::Matrix2d alpha;
    alpha << m.s1.real() + diag, m.s1.imag(),
             m.s1.imag(), -m.s1.real() + diag;
    Eigen::Matrix2d beta;
    beta << m.s2.real() + diag, m.s2.imag(),
            m.s2.imag(), -m.s2.real() + diag;
    Eigen::Matrix2d gamma;
    gamma << m.c.real() + m.d.real(), m.c.imag() + m.d.imag(),
             m.c.imag() - m.d.imag(), -m.c.real() + m.d.real();

    CovarianceMatrix cov;
    cov.sigma.block<2, 2>(0, 0) = alpha;
    cov.sigma.block<2, 2>(2, 2) = beta;
    cov.sigma.block<2, 2>(0, 2) = gamma;
    cov.sigma.block<2, 2>(2, 0) = gamma.transpose();
    return cov;
}

CovarianceMatrix partial_transpose(const CovarianceMatrix& cov)
{
    const Eigen::Vector4d lambda(1.0, 1.0, 1.0, -1.0);
    CovarianceMatrix out;
    out.sigma = lambda.asDiagonal() * cov.sigma * lambda.asDiagonal();
    return out;
}

SymplecticInvariants symplectic_invariants(const CovarianceMatrix& cov)
{
    SymplecticInvariants inv;
    inv.A = det2(cov.alpha());
    inv.B = det2(cov.beta());
    inv.C = det2(cov.gamma_block());
    // Pivoted LU keeps the relative accuracy of the determinant when the moments
    // are large and sigma is close to singular; cofactor expansion does not.
    inv.Sigma = cov.sigma.fullPivLu().determinant();
    return inv;
}

NegativityResult log_negativity(const CovarianceMatrix& cov)
{
    NegativityResult res;
    res.invariants = symplectic_invariants(cov);
    const auto& inv = res.invariants;

    const double dt = inv.A + inv.B - 2.0 * inv.C;
    if (!std::isfinite(dt) || !std::isfinite(inv.Sigma) || dt <= 0.0) {
        throw NumericalError("non-physical covariance: invalid symplectic invariants");
    }
    // Scaled discriminant 1 - 4 Sigma / Dt^2 avoids overflow of Dt^2.
    double disc = 1.0 - 4.0 * (inv.Sigma / dt) / dt;
    if (disc < 0.0) {
        if (disc < -1e-9) throw NumericalError("non-physical covariance: complex symplectic eigenvalue");
        disc = 0.0;
    }
    const double nu2 = 2.0 * inv.Sigma / (dt * (1.0 + std::sqrt(disc)));
    if (nu2 < 0.0) throw NumericalError("non-physical covariance: negative determinant");

    res.nu_minus = std::sqrt(nu2);
    res.e_n = std::max(0.0, -std::log2(2.0 * res.nu_minus));
    return res;
}

std::array<double, 2> symplectic_spectrum(const CovarianceMatrix& cov, bool pt)
{
    const Eigen::Matrix4d s = pt ? partial_transpose(cov).sigma : cov.sigma;
    const Eigen::Matrix4d js = symplectic_form() * s;
    Eigen::EigenSolver<Eigen::Matrix4d> solver(js, false);
    if (solver.info() != Eigen::Success) throw NumericalError("symplectic_spectrum: eigen-solver failed");

    // Eigenvalues of J sigma are +-i nu; those of -iJ sigma are +-nu.
    std::array<double, 4> mods;
    for (int i = 0; i < 4; ++i) mods[i] = std::abs(solver.eigenvalues()(i));
    std::sort(mods.begin(), mods.end());
    return {0.5 * (mods[0] + mods[1]), 0.5 * (mods[2] + mods[3])};
}

double log_negativity_from_spectrum(const std::array<double, 2>& spectrum)
{
    double e = 0.0;
    for (double nu : spectrum) e -= std::log2(std::min(1.0, 2.0 * nu));
    return e;
}

double uncertainty_margin(const CovarianceMatrix& cov)
{
    const Eigen::Matrix4cd h = cov.sigma.cast<cplx>() + cplx(0.0, 0.5) * symplectic_form().cast<cplx>();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix4cd> solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) throw NumericalError("uncertainty_margin: eigen-solver failed");
    return solver.eigenvalues()(0);
}

bool is_physical(const CovarianceMatrix& cov, double tol)
{
    const double scale = std::max(1.0, cov.sigma.cwiseAbs().maxCoeff());
    return uncertainty_margin(cov) >= -tol * scale;
}

} // namespace parament
