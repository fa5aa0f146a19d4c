#include "doctest.h"

#include <cmath>
#include <random>
#include <sstream>

#include "parament/fit.hpp"
#include "parament/io.hpp"

using namespace parament;

namespace {

std::vector<BoundarySample> synthetic(const BoundaryConstants& k)
{
    std::vector<BoundarySample> s;
    for (double q : {2000.0, 5000.0, 10000.0})
        for (double eps : {1.0e-2, 1.6e-2, 2.5e-2})
            for (double d : {0.0, 1e-12, 1e-10, 1e-9, 1e-8, 1e-7})
                s.push_back({d, eps, q, eval_boundary(d, eps, q, k)});
    return s;
}

} // namespace

TEST_CASE("published constants")
{
    const BoundaryConstants k = BoundaryConstants::published();
    CHECK(k.a1 == 2.08);
    CHECK(k.b1 == -0.04);
    CHECK(k.a2 == -1900.0);
    CHECK(k.b2 == -4.82);
}

TEST_CASE("eval_boundary")
{
    // D = 0 reduces to Q eps / 4 whatever the constants
    CHECK(eval_boundary(0.0, 1.6e-2, 5000.0) == doctest::Approx(20.0));
    CHECK(eval_boundary(0.0, 1.6e-2, 5000.0, {1, 2, 3, 4}) == doctest::Approx(20.0));
    // by hand: (2.08 sqrt(0.016) - 0.04) 5000 - 1900 * 0.016 - 4.82 = 1080.29;
    // 20 / (1 + 1080.29e-4) = 18.050
    CHECK(eval_boundary(1e-8, 1.6e-2, 5000.0) == doctest::Approx(18.050).epsilon(1e-4));
    CHECK(boundary_slope(1.6e-2, 5000.0, {}) == doctest::Approx(1080.29).epsilon(1e-5));

    // denominator through zero at low Q
    CHECK_THROWS_WITH_AS(eval_boundary(1e-3, 1.6e-2, 10.0), "approximation out of validity range",
                         std::domain_error);
    CHECK_THROWS_AS(eval_boundary(-1e-9, 1.6e-2, 5000.0), std::invalid_argument);
    CHECK_THROWS_AS(eval_boundary(1e-9, 0.0, 5000.0), std::invalid_argument);
    CHECK_THROWS_AS(eval_boundary(1e-9, 1.6e-2, 0.0), std::invalid_argument);
}

TEST_CASE("round trip on noise-free data")
{
    const BoundaryConstants k = BoundaryConstants::published();
    for (FitWeights w : {FitWeights::uniform, FitWeights::inverse_square}) {
        const FitReport r = fit_boundary(synthetic(k), w);
        REQUIRE(r.status == "ok");
        REQUIRE(r.constants.has_value());
        CHECK(r.rank == 4);
        CHECK(r.constants->a1 == doctest::Approx(k.a1).epsilon(1e-6));
        CHECK(r.constants->b1 == doctest::Approx(k.b1).epsilon(1e-6));
        CHECK(r.constants->a2 == doctest::Approx(k.a2).epsilon(1e-6));
        CHECK(r.constants->b2 == doctest::Approx(k.b2).epsilon(1e-6));
        CHECK(r.max_relative < 1e-9);
        CHECK(r.slopes.size() == 9);
    }

    const BoundaryConstants other{1.5, 0.1, -500.0, 3.0};
    const FitReport r = fit_boundary(synthetic(other));
    REQUIRE(r.constants.has_value());
    CHECK(r.constants->a2 == doctest::Approx(other.a2).epsilon(1e-6));
}

TEST_CASE("noisy data: predictions stay close")
{
    std::mt19937_64 rng(43);
    std::normal_distribution<double> g(0.0, 1e-3);
    auto s = synthetic(BoundaryConstants::published());
    for (auto& x : s) x.n_t0 *= 1.0 + g(rng);
    const FitReport r = fit_boundary(s, FitWeights::inverse_square);
    REQUIRE(r.constants.has_value());
    CHECK(r.max_relative < 0.01);
    CHECK(r.rms_relative < 3e-3);
}

TEST_CASE("underdetermined and degenerate inputs")
{
    std::vector<BoundarySample> one;
    for (double d : {1e-10, 1e-9, 1e-8}) one.push_back({d, 1.6e-2, 5000.0, eval_boundary(d, 1.6e-2, 5000.0)});
    const FitReport r = fit_boundary(one);
    CHECK(r.status == "underdetermined");
    CHECK_FALSE(r.constants.has_value());
    REQUIRE(r.slopes.size() == 1);
    CHECK(r.slopes[0].slope == doctest::Approx(boundary_slope(1.6e-2, 5000.0, {})).epsilon(1e-9));
    CHECK(r.max_relative < 1e-9);

    std::vector<BoundarySample> flat{{0.0, 1.6e-2, 5000.0, 20.0}, {0.0, 1e-2, 5000.0, 12.5}};
    CHECK_THROWS_AS(fit_boundary(flat), std::invalid_argument);
    CHECK_THROWS_AS(fit_boundary({}), std::invalid_argument);
    CHECK_THROWS_AS(fit_boundary({{1e-9, 1.6e-2, 5000.0, -1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(parse_fit_weights("cubic"), std::invalid_argument);
}

TEST_CASE("boundary CSV round trip")
{
    const auto s = synthetic(BoundaryConstants::published());
    std::stringstream io;
    write_boundary_csv(io, s, Json{{"command", "boundary"}});
    const auto back = read_boundary_csv(io);
    REQUIRE(back.size() == s.size());
    for (std::size_t i = 0; i < s.size(); ++i) {
        CHECK(back[i].noise_width == s[i].noise_width);
        CHECK(back[i].n_t0 == s[i].n_t0);
    }

    std::istringstream reordered("# comment\nnT0,Q,D,eps,extra\n20,5000,0,0.016,x\n");
    const auto r = read_boundary_csv(reordered);
    REQUIRE(r.size() == 1);
    CHECK(r[0].quality == 5000.0);
    CHECK(r[0].n_t0 == 20.0);

    std::istringstream missing("D,eps,Q\n0,0.016,5000\n");
    CHECK_THROWS_AS(read_boundary_csv(missing), std::invalid_argument);
    std::istringstream bad("D,eps,Q,nT0\n0,0.016,5000,abc\n");
    CHECK_THROWS_AS(read_boundary_csv(bad), std::invalid_argument);
}
