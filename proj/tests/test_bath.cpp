#include "doctest.h"

#include <cmath>
#include <functional>

#include "sbqcp/bath.hpp"
#include "sbqcp/errors.hpp"

using namespace sbqcp;

namespace {

// Composite Simpson in t = ln w on [ln lo, 0] plus a leading-order tail;
// deliberately unrelated to the production Gauss rule.
double simpson_log(const std::function<double(double)>& f, double lo, double tail_p, double tail_c)
{
    const int n = 400000;
    const double t0 = std::log(lo);
    const double h = -t0 / n;
    double acc = 0.0;
    for (int i = 0; i <= n; ++i) {
        const double t = t0 + i * h;
        const double w = std::exp(t);
        const double c = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        acc += c * f(w) * w;
    }
    return acc * h / 3.0 + tail_c * std::pow(lo, tail_p + 1.0) / (tail_p + 1.0);
}

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }

double moment(double s, MomentKind k, double W, double a = 0.0)
{
    return bath_moment(BathParams{s, 1.0, 0.1}, k, W, a).value;
}

}  // namespace

TEST_CASE("spectral density")
{
    CHECK(spectral_density({1.0, 0.5, 0.1}, 0.5) == doctest::Approx(0.5));
    CHECK(spectral_density({1.0, 0.5, 0.1}, 1.5) == 0.0);
    CHECK(spectral_density({0.5, 0.1, 0.1}, 0.25) == doctest::Approx(0.1));
    CHECK_THROWS_AS(spectral_density({1.0, 0.5, 0.1}, 0.0), DomainError);
}

TEST_CASE("ohmic closed forms")
{
    for (double W : {1e-6, 1e-3, 0.05, 0.5, 2.0}) {
        const double i1 = std::log((1.0 + W) / W) + W / (1.0 + W) - 1.0;
        const double jd = 1.0 / W - 1.0 / (1.0 + W);
        const double k = 0.5 / (1.0 + W);
        CHECK(rel(moment(1.0, MomentKind::I1, W), i1) < 1e-9);
        CHECK(rel(moment(1.0, MomentKind::Jd, W), jd) < 1e-9);
        CHECK(rel(moment(1.0, MomentKind::K, W), k) < 1e-9);
    }
    CHECK(moment(1.0, MomentKind::I1, 0.5) == doctest::Approx(std::log(3.0) - 2.0 / 3.0).epsilon(1e-12));
    CHECK(moment(1.0, MomentKind::Jd, 0.5) == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("extreme scales use the overflow-safe path")
{
    const double W = 1e-283;
    const auto r = detail::log_grid_integrals(1.0, W, 0.0, kI1, QuadratureConfig{});
    const double exact = std::log((1.0 + W) / W) + W / (1.0 + W) - 1.0;
    CHECK(rel(r.i1, exact) < 1e-10);
}

TEST_CASE("two-scale kernels against brute force")
{
    struct Case { double s, W, a; };
    for (const Case c : {Case{1.0, 0.05, 0.01}, Case{0.5, 0.05, 0.01}, Case{0.25, 0.02, 1e-7},
                         Case{0.75, 0.3, 2e-3}, Case{1.5, 0.1, 0.4}}) {
        const double s = c.s, W = c.W, a = c.a;
        const double lo = 1e-13 * std::min(W, a);
        const double i2 = simpson_log([&](double w) { return std::pow(w, s) / ((w + W) * (w + W) * (w + a)); },
                                      lo, s, 1.0 / (W * W * a));
        const double i3 = simpson_log(
            [&](double w) { return std::pow(w, s + 1) / ((w + W) * (w + W) * (w + a) * (w + a)); }, lo, s + 1,
            1.0 / (W * W * a * a));
        const double i4 = simpson_log(
            [&](double w) { return std::pow(w, s) / ((w + W) * (w + W) * (w + a) * (w + a)); }, lo, s,
            1.0 / (W * W * a * a));
        CAPTURE(s);
        CHECK(rel(moment(s, MomentKind::I2, W, a), i2) < 1e-8);
        CHECK(rel(moment(s, MomentKind::I3, W, a), i3) < 1e-8);
        CHECK(rel(moment(s, MomentKind::I4, W, a), i4) < 1e-8);
    }
}

TEST_CASE("infrared kernel D")
{
    for (double s : {0.25, 0.5, 0.75, 1.0}) CHECK(bath_moment({s, 0.1, 0.1}, MomentKind::D, 0.3).divergent);
    const auto d = bath_moment({1.5, 0.1, 0.1}, MomentKind::D, 1.0);
    REQUIRE_FALSE(d.divergent);
    const double ref = simpson_log([](double w) { return std::pow(w, -0.5) / ((w + 1) * (w + 1)); }, 1e-14, -0.5, 1.0);
    CHECK(rel(d.value, ref) < 1e-8);
}

TEST_CASE("a = 0 limits")
{
    CHECK(rel(moment(0.5, MomentKind::I2, 0.2, 0.0), moment(0.5, MomentKind::Jd, 0.2)) < 1e-14);
    CHECK(bath_moment({0.5, 1.0, 0.1}, MomentKind::I4, 0.2, 0.0).divergent);
    CHECK_FALSE(bath_moment({1.5, 1.0, 0.1}, MomentKind::I4, 0.2, 0.0).divergent);
}

TEST_CASE("monotonicity")
{
    for (double s : {0.25, 1.0, 1.5}) {
        double prev = INFINITY;
        for (double W = 1e-4; W < 2.0; W *= 3.0) {
            const double v = moment(s, MomentKind::I1, W);
            CHECK(v < prev);
            prev = v;
        }
        prev = INFINITY;
        for (double a = 1e-9; a < 2.0; a *= 5.0) {
            const double v = moment(s, MomentKind::I4, 0.1, a);
            CHECK(v < prev);
            prev = v;
        }
    }
}

TEST_CASE("errors")
{
    CHECK_THROWS_AS(bath_moment({1.0, 0.1, 0.1}, MomentKind::I1, 0.0), DomainError);
    CHECK_THROWS_AS(bath_moment({1.0, 0.1, 0.1}, MomentKind::I1, -1.0), DomainError);
    CHECK_THROWS_AS(bath_moment({-1.0, 0.1, 0.1}, MomentKind::I1, 0.1), DomainError);
    CHECK_THROWS_AS(discretize_bath({1.0, 0.1, 0.1}, Scheme::linear, 0), DomainError);
    CHECK_THROWS_AS(discretize_bath({1.0, 0.1, 0.1}, Scheme::logarithmic, 4, 1.0), DomainError);
}

TEST_CASE("refinement invariance")
{
    for (double s : {0.25, 0.5, 1.0, 1.7}) {
        const auto a = detail::log_grid_integrals(s, 3e-3, 1e-6, kAll, QuadratureConfig{}, 1.0);
        const auto b = detail::log_grid_integrals(s, 3e-3, 1e-6, kAll, QuadratureConfig{}, 2.0);
        CHECK(rel(a.i1, b.i1) < 1e-10);
        CHECK(rel(a.i2, b.i2) < 1e-10);
        CHECK(rel(a.i3, b.i3) < 1e-10);
        CHECK(rel(a.i4, b.i4) < 1e-10);
        CHECK(rel(a.jd, b.jd) < 1e-10);
        CHECK(rel(a.kbar, b.kbar) < 1e-10);
    }
}

TEST_CASE("discretization")
{
    const BathParams p{1.0, 0.5, 0.1};
    const auto one = discretize_bath(p, Scheme::linear, 1);
    REQUIRE(one.size() == 1);
    CHECK(one.couplings[0] * one.couplings[0] == doctest::Approx(0.5));

    const auto lg = discretize_bath({0.5, 0.2, 0.1}, Scheme::logarithmic, 4, 2.0);
    REQUIRE(lg.size() == 4);
    for (std::size_t i = 1; i < lg.size(); ++i) CHECK(lg.frequencies[i] < lg.frequencies[i - 1]);

    for (double s : {0.25, 1.0, 1.5}) {
        for (auto scheme : {Scheme::linear, Scheme::logarithmic}) {
            const BathParams q{s, 0.3, 0.1};
            const auto b = discretize_bath(q, scheme, 64, 1.5);
            double sum = 0.0, sum_f = 0.0;
            for (std::size_t i = 0; i < b.size(); ++i) {
                const double g2 = b.couplings[i] * b.couplings[i];
                sum += g2;
                sum_f += g2 / (b.frequencies[i] + 1.0);
                CHECK(b.frequencies[i] > 0.0);
                CHECK(b.frequencies[i] <= 1.0);
            }
            CHECK(std::abs(sum - 2.0 * q.alpha / (s + 1.0)) < 1e-12);
            const double exact = simpson_log([&](double w) { return 2 * q.alpha * std::pow(w, s) / (w + 1.0); },
                                             1e-12, s, 2 * q.alpha);
            CHECK(rel(sum_f, exact) < 0.01);
        }
    }
}

TEST_CASE("kernel sum providers")
{
    const BathParams p{0.5, 0.2, 0.1};
    const ContinuumSums cont(p);
    const auto k = cont.eval(0.04, 0.003, kAll);
    CHECK(rel(k.i1, p.alpha * moment(0.5, MomentKind::I1, 0.04)) < 1e-10);
    CHECK(rel(k.i2, p.alpha * moment(0.5, MomentKind::I2, 0.04, 0.003)) < 1e-10);
    CHECK(rel(k.k, bath_moment(p, MomentKind::K, 0.04).value) < 1e-10);
    CHECK(cont.k_at_zero() == doctest::Approx(p.alpha / (2 * p.s)));

    // Fine linear discretization approaches the continuum for smooth kernels.
    const DiscreteSums disc(discretize_bath(p, Scheme::linear, 20000), p.alpha);
    const auto d = disc.eval(0.5, 0.8, kAll);
    const auto c = cont.eval(0.5, 0.8, kAll);
    CHECK(rel(d.i1, c.i1) < 1e-3);
    CHECK(rel(d.i3, c.i3) < 1e-3);
    CHECK(rel(d.k, c.k) < 1e-3);
}
