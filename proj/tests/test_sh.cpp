#include "doctest.h"

#include <cmath>

#include "sbqcp/ansatz_sh.hpp"
#include "sbqcp/errors.hpp"

using namespace sbqcp;

namespace {

// Ohmic I1 in closed form.
double i1_ohmic(double W) { return std::log((1.0 + W) / W) + W / (1.0 + W) - 1.0; }

// eta = exp(-alpha I1(eta Delta)) by bisection on the residual in eta.
double eta_ohmic(double alpha, double delta)
{
    double lo = 1e-300, hi = 1.0;
    for (int i = 0; i < 4000; ++i) {
        const double mid = std::sqrt(lo * hi);
        const double r = mid - std::exp(-alpha * i1_ohmic(mid * delta));
        (r > 0.0 ? hi : lo) = mid;
        if (hi / lo - 1.0 < 1e-15) break;
    }
    return std::sqrt(lo * hi);
}

}  // namespace

TEST_CASE("trivial limits")
{
    const auto free = solve_sh(BathParams{0.5, 0.0, 0.2});
    CHECK(free.eta0 == 1.0);
    CHECK(free.energy == doctest::Approx(-0.1).epsilon(1e-14));

    for (double s : {0.25, 0.5, 1.0, 1.5}) {
        const auto sol = solve_sh(BathParams{s, 0.3, 0.0});
        CHECK(sol.energy == doctest::Approx(-0.3 / (2.0 * s)).epsilon(1e-9));
    }
}

TEST_CASE("ohmic fixed point against bisection")
{
    for (double alpha : {0.05, 0.2, 0.4, 0.6}) {
        const auto sol = solve_sh(BathParams{1.0, alpha, 0.1});
        const double ref = eta_ohmic(alpha, 0.1);
        CHECK(sol.converged);
        CHECK(sol.eta0 == doctest::Approx(ref).epsilon(1e-9));
    }
}

TEST_CASE("ohmic scaling limit")
{
    // eta0 -> (e Delta)^(alpha / (1 - alpha)) for Delta << 1.
    const double delta = 1e-7, alpha = 0.5;
    const auto sol = solve_sh(BathParams{1.0, alpha, delta});
    CHECK(sol.eta0 == doctest::Approx(std::pow(std::exp(1.0) * delta, alpha / (1.0 - alpha))).epsilon(1e-5));
}

TEST_CASE("functional is stationary at the fixed point")
{
    const BathParams p{0.5, 0.1, 0.1};
    const ContinuumSums bath(p);
    const auto sol = solve_sh(bath, p.delta);
    const double W = sol.eta0 * p.delta, h = 1e-5 * W;
    const double d = (sh_functional(bath, p.delta, W + h) - sh_functional(bath, p.delta, W - h)) / (2.0 * h);
    CHECK(std::abs(d) < 1e-7);
    CHECK(sh_functional(bath, p.delta, W) == doctest::Approx(sol.energy).epsilon(1e-12));
    CHECK(sh_functional(bath, p.delta, 1.3 * W) > sol.energy);
    CHECK(sh_functional(bath, p.delta, 0.7 * W) > sol.energy);
}

TEST_CASE("collapse above the critical coupling")
{
    const auto sol = solve_sh(BathParams{0.5, 0.3, 0.1});
    CHECK(sol.eta0 == 0.0);
    CHECK(sol.energy == doctest::Approx(-0.3).epsilon(1e-9));
}

TEST_CASE("energy is non-increasing in alpha")
{
    double prev = 0.0;
    for (double a = 0.0; a <= 0.3001; a += 0.02) {
        const double e = solve_sh(BathParams{0.75, a, 0.1}).energy;
        CHECK(e <= prev + 1e-14);
        prev = e;
    }
}

TEST_CASE("critical coupling")
{
    const auto r = sh_alpha_c(BathParams{0.5, 0.0, 0.1});
    CHECK(r.alpha_c == doctest::Approx(0.1768).epsilon(0.02));
    CHECK(r.alpha_hi - r.alpha_lo <= 1e-5);
    CHECK(r.alpha_lo < r.alpha_c);
    CHECK(r.alpha_c <= r.alpha_hi);
    CHECK_THROWS_AS(sh_alpha_c(BathParams{1.5, 0.0, 0.1}), NoTransition);
}

TEST_CASE("invalid input")
{
    CHECK_THROWS_AS(solve_sh(BathParams{-1.0, 0.1, 0.1}), DomainError);
    CHECK_THROWS_AS(solve_sh(BathParams{1.0, -0.1, 0.1}), DomainError);
    CHECK_THROWS_AS(sh_energy(BathParams{1.0, 0.1, 0.1}, 1.5), DomainError);
}
