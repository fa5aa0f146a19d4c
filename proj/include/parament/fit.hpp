// fit.hpp — Analytic approximation of the n_T0(D) boundary and its least-squares refit

#pragma once

#include <optional>
#include <string>
#include <vector>

namespace parament {

// n_T0 = (Q eps / 4) / (1 + ((a1 sqrt(eps) + b1) Q + a2 eps + b2) sqrt(D / omega))
struct BoundaryConstants {
    double a1{2.08};
    double b1{-4e-2};
    double a2{-1.9e3};
    double b2{-4.82};

    static BoundaryConstants published() { return {}; }
};

// Throws std::invalid_argument on bad inputs and std::domain_error
// ("approximation out of validity range") when the denominator is not positive.
double eval_boundary(double noise_width, double epsilon, double quality,
                     const BoundaryConstants& k = BoundaryConstants::published(), double omega = 1.0);

// Slope c(Q, eps) of Q eps / (4 n_T0) - 1 against sqrt(D / omega).
double boundary_slope(double epsilon, double quality, const BoundaryConstants& k);

struct BoundarySample {
    double noise_width{0.0};
    double epsilon{0.0};
    double quality{0.0};
    double n_t0{0.0};
};

enum class FitWeights { uniform, inverse_square };   // inverse_square: 1 / n_T0^2

FitWeights parse_fit_weights(const std::string& name);
const char* to_string(FitWeights w);

struct SlopeFit {
    double quality{0.0};
    double epsilon{0.0};
    double slope{0.0};
    int samples{0};
    double residual_norm{0.0};     // of the stage-one regression
};

struct SampleResidual {
    BoundarySample sample;
    double predicted{0.0};         // eval_boundary with the fitted constants (nan if out of range)
    double relative{0.0};          // (predicted - n_T0) / n_T0
};

struct FitReport {
    std::string status;            // "ok" or "underdetermined"
    std::optional<BoundaryConstants> constants;
    std::vector<SlopeFit> slopes;
    std::vector<double> slope_residuals;   // c - c_model per (Q, eps), when constants exist
    std::vector<SampleResidual> residuals;
    double rms_relative{0.0};
    double max_relative{0.0};
    int rank{0};
    FitWeights weights{FitWeights::uniform};
    double omega{1.0};
};

// Two-stage linear least squares. Throws std::invalid_argument when no sample has D > 0
// or any sample is unusable.
FitReport fit_boundary(const std::vector<BoundarySample>& samples,
                       FitWeights weights = FitWeights::uniform, double omega = 1.0);

} // namespace parament
