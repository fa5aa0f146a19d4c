// fit.cpp — Boundary formula and its two-stage linear refit

#include "parament/fit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

namespace parament {

double boundary_slope(double epsilon, double quality, const BoundaryConstants& k)
{
    return (k.a1 * std::sqrt(epsilon) + k.b1) * quality + k.a2 * epsilon + k.b2;
}

double eval_boundary(double noise_width, double epsilon, double quality,
                     const BoundaryConstants& k, double omega)
{
    if (!(noise_width >= 0.0) || !std::isfinite(noise_width)) {
        throw std::invalid_argument("eval_boundary: D must be finite and >= 0");
    }
    if (!(epsilon > 0.0) || !(quality > 0.0) || !(omega > 0.0)) {
        throw std::invalid_argument("eval_boundary: eps, Q and omega must be positive");
    }
    const double denom = 1.0 + boundary_slope(epsilon, quality, k) * std::sqrt(noise_width / omega);
    if (!(denom > 0.0)) throw std::domain_error("approximation out of validity range");
    return quality * epsilon / 4.0 / denom;
}

FitWeights parse_fit_weights(const std::string& name)
{
    if (name == "uniform") return FitWeights::uniform;
    if (name == "inverse_square") return FitWeights::inverse_square;
    throw std::invalid_argument("unknown weighting '" + name + "' (uniform or inverse_square)");
}

const char* to_string(FitWeights w)
{
    return w == FitWeights::uniform ? "uniform" : "inverse_square";
}

FitReport fit_boundary(const std::vector<BoundarySample>& samples, FitWeights weights, double omega)
{
    if (samples.empty()) throw std::invalid_argument("fit: no samples");
    if (!(omega > 0.0)) throw std::invalid_argument("fit: omega must be positive");
    for (const BoundarySample& s : samples) {
        if (!(s.noise_width >= 0.0) || !(s.epsilon > 0.0) || !(s.quality > 0.0) || !(s.n_t0 > 0.0) ||
            !std::isfinite(s.noise_width) || !std::isfinite(s.epsilon) || !std::isfinite(s.quality) ||
            !std::isfinite(s.n_t0)) {
            throw std::invalid_argument("fit: every sample needs D >= 0 and positive finite eps, Q, n_T0");
        }
    }
    if (std::none_of(samples.begin(), samples.end(), [](const auto& s) { return s.noise_width > 0.0; })) {
        throw std::invalid_argument("fit: all samples have D = 0, the slope is undefined");
    }

    FitReport rep;
    rep.weights = weights;
    rep.omega = omega;

    // Stage one: y = Q eps / (4 n_T0) - 1 = c x with x = sqrt(D / omega), per (Q, eps).
    std::map<std::pair<double, double>, std::vector<const BoundarySample*>> groups;
    for (const BoundarySample& s : samples) groups[{s.quality, s.epsilon}].push_back(&s);

    std::map<std::pair<double, double>, double> slope_of;
    for (const auto& [key, group] : groups) {
        double sxx = 0.0, sxy = 0.0;
        for (const BoundarySample* s : group) {
            const double x = std::sqrt(s->noise_width / omega);
            const double y = s->quality * s->epsilon / (4.0 * s->n_t0) - 1.0;
            const double w = weights == FitWeights::uniform ? 1.0 : 1.0 / (s->n_t0 * s->n_t0);
            sxx += w * x * x;
            sxy += w * x * y;
        }
        if (!(sxx > 0.0)) {
            throw std::invalid_argument("fit: (Q, eps) pair without a D > 0 sample");
        }
        SlopeFit f;
        f.quality = key.first;
        f.epsilon = key.second;
        f.slope = sxy / sxx;
        f.samples = static_cast<int>(group.size());
        double rss = 0.0;
        for (const BoundarySample* s : group) {
            const double x = std::sqrt(s->noise_width / omega);
            const double y = s->quality * s->epsilon / (4.0 * s->n_t0) - 1.0;
            rss += (y - f.slope * x) * (y - f.slope * x);
        }
        f.residual_norm = std::sqrt(rss);
        slope_of[key] = f.slope;
        rep.slopes.push_back(f);
    }

    // Stage two: c = a1 sqrt(eps) Q + b1 Q + a2 eps + b2.
    const Eigen::Index m = static_cast<Eigen::Index>(rep.slopes.size());
    Eigen::MatrixXd a(m, 4);
    Eigen::VectorXd c(m);
    for (Eigen::Index i = 0; i < m; ++i) {
        const SlopeFit& f = rep.slopes[i];
        a.row(i) << std::sqrt(f.epsilon) * f.quality, f.quality, f.epsilon, 1.0;
        c(i) = f.slope;
    }
    // Column scaling keeps the rank test meaningful when Q ~ 1e3 and eps ~ 1e-2.
    const Eigen::VectorXd scale = a.colwise().norm().transpose().cwiseMax(1e-300);
    const Eigen::MatrixXd as = a * scale.cwiseInverse().asDiagonal();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(as);
    qr.setThreshold(1e-10);
    rep.rank = static_cast<int>(qr.rank());

    if (m >= 4 && rep.rank == 4) {
        const Eigen::VectorXd x = qr.solve(c).cwiseQuotient(scale);
        rep.constants = BoundaryConstants{x(0), x(1), x(2), x(3)};
        rep.status = "ok";
        const Eigen::VectorXd r = c - a * x;
        rep.slope_residuals.assign(r.data(), r.data() + r.size());
    } else {
        rep.status = "underdetermined";
    }

    double sum2 = 0.0;
    for (const BoundarySample& s : samples) {
        SampleResidual r;
        r.sample = s;
        const double slope = rep.constants ? boundary_slope(s.epsilon, s.quality, *rep.constants)
                                           : slope_of.at({s.quality, s.epsilon});
        const double denom = 1.0 + slope * std::sqrt(s.noise_width / omega);
        r.predicted = denom > 0.0 ? s.quality * s.epsilon / 4.0 / denom
                                  : std::numeric_limits<double>::quiet_NaN();
        r.relative = (r.predicted - s.n_t0) / s.n_t0;
        if (std::isfinite(r.relative)) {
            sum2 += r.relative * r.relative;
            rep.max_relative = std::max(rep.max_relative, std::abs(r.relative));
        } else {
            rep.max_relative = std::numeric_limits<double>::infinity();
        }
        rep.residuals.push_back(r);
    }
    rep.rms_relative = std::sqrt(sum2 / static_cast<double>(samples.size()));
    return rep;
}

} // namespace parament
