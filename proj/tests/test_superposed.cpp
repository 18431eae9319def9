#include "doctest.h"

#include <algorithm>
#include <cmath>

#include "sbqcp/ansatz_degenerate.hpp"
#include "sbqcp/ansatz_sh.hpp"
#include "sbqcp/ansatz_superposed.hpp"
#include "sbqcp/errors.hpp"

using namespace sbqcp;

TEST_CASE("hyperbolic bracket")
{
    CHECK(hyperbolic_bracket(0.0) == 0.0);
    for (long double M : {1e-3L, 0.3L, 0.9L}) {
        const long double ref = std::cosh(M) - 1.0L - M * (std::sinh(M) - M);
        const long double series = M * M / 2 - M * M * M * M / 8 - std::pow(M, 6.0L) / 144;
        CHECK(hyperbolic_bracket(static_cast<double>(M)) == doctest::Approx(static_cast<double>(ref)).epsilon(1e-9));
        if (M < 0.5L) CHECK(hyperbolic_bracket(static_cast<double>(M)) == doctest::Approx(static_cast<double>(series)).epsilon(1e-4));
    }
    CHECK(hyperbolic_bracket(-0.4) == doctest::Approx(hyperbolic_bracket(0.4)));
}

TEST_CASE("zero coupling")
{
    for (double s : {0.5, 1.0, 1.5}) {
        const auto t = minimize_tau(BathParams{s, 0.0, 0.1});
        CHECK(t.best.energy == doctest::Approx(-0.05).epsilon(1e-12));
        CHECK(t.best.rho == 1.0);
    }
}

TEST_CASE("self-consistency of the converged state")
{
    for (double s : {0.5, 1.0}) {
        const BathParams p{s, s == 1.0 ? 0.4 : 0.08, 0.1};
        const ContinuumSums bath(p);
        const auto t = minimize_tau(bath, p.delta, p.s);
        REQUIRE(t.has_nondegenerate);
        const auto& st = t.nondegenerate;
        const auto m = superposed_map(bath, p.delta, st.tau, st.W, st.a);
        REQUIRE(m.valid);
        CHECK(m.log_next_W == doctest::Approx(std::log(st.W)).epsilon(1e-9));
        CHECK(m.log_next_a == doctest::Approx(std::log(st.a)).epsilon(1e-9));
        CHECK(st.rho == doctest::Approx(compute_rho(bath, st)).epsilon(1e-9));
        CHECK(st.rho > 0.0);
        CHECK(st.rho < 1.0);
        CHECK(st.M == doctest::Approx(2.0 * st.tau * st.W * bath.eval(st.W, st.a, kI2).i2).epsilon(1e-9));
        CHECK(st.u_plus() * st.u_plus() + st.u_minus() * st.u_minus() == doctest::Approx(1.0));
    }
}

TEST_CASE("small tau approaches SH")
{
    const BathParams p{0.5, 0.08, 0.1};
    const ContinuumSums bath(p);
    const auto sh = solve_sh(bath, p.delta);
    double prev = 0.0;
    for (double tau : {0.1, 0.05, 0.02, 0.005}) {
        const auto st = solve_inner(bath, p.delta, tau);
        CHECK(st.converged);
        const double gain = sh.energy - st.energy;
        CHECK(gain > 0.0);
        if (prev > 0.0) CHECK(gain < prev);
        prev = gain;
    }
    CHECK(prev < 1e-7);
}

TEST_CASE("variational hierarchy on the continuum")
{
    for (double s : {0.25, 0.5, 0.75, 1.0}) {
        for (double frac : {0.3, 0.8}) {
            const BathParams p{s, frac * (s == 1.0 ? 1.0 : 0.3 * s), 0.1};
            const ContinuumSums bath(p);
            const double e_sh = solve_sh(bath, p.delta).energy;
            const double e_d = degenerate_ground(bath, p.delta).energy;
            const double e = minimize_tau(bath, p.delta, p.s).best.energy;
            CHECK(e <= std::min(e_sh, e_d) + 1e-10);
        }
    }
}

TEST_CASE("energy on explicit mode sums")
{
    const BathParams p{0.5, 0.1, 0.1};
    const auto disc = discretize_bath(p, Scheme::linear, 40);
    const DiscreteSums sums(disc, p.alpha);
    const auto t = minimize_tau(sums, p.delta, p.s);
    REQUIRE(t.has_nondegenerate);
    const auto& st = t.nondegenerate;
    const double e = discrete_energy_of_phi(disc, p.delta, st.W, st.eta, profile_of(disc, st));
    CHECK(e == doctest::Approx(st.energy).epsilon(1e-10));
}

TEST_CASE("stationary profile on a discrete bath")
{
    for (double s : {0.5, 1.0}) {
        const BathParams p{s, s == 1.0 ? 0.3 : 0.08, 0.1};
        const auto disc = discretize_bath(p, Scheme::linear, 3);
        const DiscreteSums sums(disc, p.alpha);
        const auto t = minimize_tau(sums, p.delta, p.s);
        REQUIRE(t.has_nondegenerate);
        const auto prof = stationary_profile(disc, p.delta, t.nondegenerate);
        CHECK(prof.converged);
        const auto g = stationarity_residual(disc, p.delta, t.nondegenerate.W, t.nondegenerate.eta, prof.phi);
        for (const double x : g) CHECK(std::abs(x) < 1e-6);
        CHECK(prof.energy <= t.nondegenerate.energy + 1e-12);
    }
}

TEST_CASE("ohmic asymptotic overlap")
{
    const BathParams p{1.0, 0.9, 0.1};
    const auto t = minimize_tau(p);
    REQUIRE(t.has_nondegenerate);
    const auto& st = t.nondegenerate;
    CHECK(st.rho < 1e-2);
    CHECK(rho_asymptotic_s1(p, st) == doctest::Approx(st.rho).epsilon(0.2));
    SuperposedSolution big = st;
    big.tau = 1.1;
    CHECK_THROWS_AS(rho_asymptotic_s1(p, big), DomainError);
    CHECK_THROWS_AS(rho_asymptotic_s1(BathParams{0.5, 0.1, 0.1}, st), DomainError);
}

TEST_CASE("super-ohmic overlap stays finite")
{
    for (double a : {0.5, 1.0, 2.0}) {
        const auto t = minimize_tau(BathParams{1.5, a, 0.1});
        REQUIRE(t.has_nondegenerate);
        CHECK(t.nondegenerate.rho > 0.05);
    }
}

TEST_CASE("delta denominator guards")
{
    SuperposedSolution st;
    st.rho = 1.0;
    CHECK_THROWS_AS(compute_delta(st), SingularDenominator);
    st.rho = 0.5;
    st.M = 0.3;
    st.E0 = -0.1;
    st.U = 0.2;
    CHECK(compute_delta(st).non_positive);
    st.M = 1.0;
    CHECK_THROWS_AS(compute_U(BathParams{1.0, 0.1, 0.1}, st), DomainError);
}

TEST_CASE("sigma_z moments")
{
    const auto t = minimize_tau(BathParams{0.5, 0.08, 0.1});
    const auto m = sigma_z_moments(t.nondegenerate);
    CHECK(m.g_avg == 0.0);
    CHECK(m.psi_plus_avg == doctest::Approx(t.nondegenerate.M));
}
