// gaussian_states.hpp — Random physical two-mode covariance matrices for tests

#pragma once

#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "parament/negativity.hpp"

namespace parament::testing {

inline Eigen::Matrix2d rot2(double th)
{
    Eigen::Matrix2d r;
    r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    return r;
}

inline Eigen::Matrix4d local(const Eigen::Matrix2d& a, const Eigen::Matrix2d& b)
{
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m.block<2, 2>(0, 0) = a;
    m.block<2, 2>(2, 2) = b;
    return m;
}

inline Eigen::Matrix4d two_mode_squeezer(double r)
{
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    const Eigen::Matrix2d z = Eigen::Vector2d(1.0, -1.0).asDiagonal();
    m.block<2, 2>(0, 0) = std::cosh(r) * Eigen::Matrix2d::Identity();
    m.block<2, 2>(2, 2) = std::cosh(r) * Eigen::Matrix2d::Identity();
    m.block<2, 2>(0, 2) = std::sinh(r) * z;
    m.block<2, 2>(2, 0) = std::sinh(r) * z;
    return m;
}

inline Eigen::Matrix4d beam_splitter(double th)
{
    Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
    m.block<2, 2>(0, 0) = std::cos(th) * Eigen::Matrix2d::Identity();
    m.block<2, 2>(2, 2) = std::cos(th) * Eigen::Matrix2d::Identity();
    m.block<2, 2>(0, 2) = std::sin(th) * Eigen::Matrix2d::Identity();
    m.block<2, 2>(2, 0) = -std::sin(th) * Eigen::Matrix2d::Identity();
    return m;
}

inline Eigen::Matrix4d squeezer(double r1, double r2)
{
    return local(Eigen::Vector2d(std::exp(r1), std::exp(-r1)).asDiagonal(),
                 Eigen::Vector2d(std::exp(r2), std::exp(-r2)).asDiagonal());
}

// sigma = S diag(nu1, nu1, nu2, nu2) S^T with a random symplectic S.
inline CovarianceMatrix random_physical(std::mt19937_64& rng, double max_squeeze = 1.2,
                                        double max_nu = 4.0)
{
    std::uniform_real_distribution<double> ang(0.0, 2.0 * M_PI), sq(-max_squeeze, max_squeeze),
        nu(0.5, max_nu);
    const Eigen::Matrix4d s = local(rot2(ang(rng)), rot2(ang(rng))) * two_mode_squeezer(sq(rng)) *
                              beam_splitter(ang(rng)) * squeezer(sq(rng) / 2, sq(rng) / 2) *
                              local(rot2(ang(rng)), rot2(ang(rng)));
    const double a = nu(rng), b = nu(rng);
    const Eigen::Vector4d d(a, a, b, b);
    CovarianceMatrix cov;
    cov.sigma = s * d.asDiagonal() * s.transpose();
    cov.sigma = 0.5 * (cov.sigma + cov.sigma.transpose()).eval();
    return cov;
}

inline PhysicalMoments tmsv_moments(double r)
{
    PhysicalMoments m;
    m.nbar = std::sinh(r) * std::sinh(r);
    m.c = 0.5 * std::sinh(2.0 * r);
    return m;
}

} // namespace parament::testing
