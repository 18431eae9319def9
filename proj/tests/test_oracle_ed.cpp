#include "doctest.h"

#include <cmath>

#include "sbqcp/errors.hpp"
#include "sbqcp/ansatz_sh.hpp"
#include "sbqcp/ansatz_superposed.hpp"
#include "sbqcp/oracle_ed.hpp"

using namespace sbqcp;

namespace {

EdInstance single_mode(double w, double g, double delta, int nmax)
{
    DiscreteBath b;
    b.frequencies = {w};
    b.couplings = {g};
    return EdInstance{b, delta, nmax};
}

EdInstance instance(double s, double alpha, int modes = 3, int nmax = 10, double delta = 0.1)
{
    return EdInstance{discretize_bath(BathParams{s, alpha, delta}, Scheme::linear, modes), delta, nmax};
}

double lowest_full(const EdInstance& inst)
{
    const Eigen::MatrixXd H(build_full_hamiltonian(inst));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
    return es.eigenvalues()[0];
}

}  // namespace

TEST_CASE("free spin")
{
    const auto inst = instance(1.0, 0.0, 2, 4);
    const auto r = ed_ground_state(inst);
    CHECK(r.energy == doctest::Approx(-0.05).epsilon(1e-12));
    CHECK(r.parity == 1);
    CHECK(r.sigma_x_avg == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(r.sigma_z_avg) < 1e-12);
}

TEST_CASE("displaced oscillator at zero tunneling")
{
    const double w = 0.7, g = 0.9;
    const auto inst = single_mode(w, g, 0.0, 40);
    const auto r = ed_ground_state(inst);
    CHECK(r.energy == doctest::Approx(-g * g / (4.0 * w)).epsilon(1e-10));
    CHECK(r.other_sector_energy == doctest::Approx(r.energy).epsilon(1e-10));
}

TEST_CASE("parity reduction matches the product basis")
{
    const auto inst = instance(0.5, 0.2, 2, 6);
    const auto sectors = dense_sector_energies(inst);
    CHECK(std::min(sectors.first, sectors.second) == doctest::Approx(lowest_full(inst)).epsilon(1e-12));
    const auto r = ed_ground_state(inst);
    CHECK(r.energy == doctest::Approx(lowest_full(inst)).epsilon(1e-11));
    CHECK(r.residual < 1e-8);
}

TEST_CASE("matrix-free apply")
{
    const auto inst = instance(0.75, 0.3);
    const SectorOperator op(inst, -1);
    std::vector<double> x(op.size()), y1(op.size()), y2(op.size());
    for (std::size_t i = 0; i < x.size(); ++i) x[i] = std::sin(0.37 * static_cast<double>(i));
    op.apply(x.data(), y1.data());
    op.apply_serial(x.data(), y2.data());
    CHECK(y1 == y2);
    const auto H = build_hamiltonian(inst, -1);
    Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    const Eigen::VectorXd ref = H * xv;
    for (std::size_t i = 0; i < x.size(); ++i) CHECK(y1[i] == doctest::Approx(ref[static_cast<Eigen::Index>(i)]));
    CHECK((Eigen::MatrixXd(H) - Eigen::MatrixXd(H).transpose()).norm() == 0.0);
}

TEST_CASE("truncation convergence")
{
    const auto lo = ed_ground_state(instance(1.0, 0.05, 2, 8));
    const auto hi = ed_ground_state(instance(1.0, 0.05, 2, 12));
    CHECK(std::abs(lo.energy - hi.energy) < 1e-8);
    double prev = 1.0;
    for (int n : {2, 4, 6, 8}) {
        const double e = ed_ground_state(instance(0.5, 0.3, 2, n)).energy;
        CHECK(e <= prev + 1e-12);
        prev = e;
    }
}

TEST_CASE("symmetry and sectors")
{
    for (double a : {0.05, 0.2, 0.4}) {
        const auto r = ed_ground_state(instance(0.5, a));
        CHECK(std::abs(r.sigma_z_avg) < 1e-8);
        CHECK(r.parity == 1);
        CHECK(r.energy <= r.other_sector_energy);
    }
}

TEST_CASE("cap")
{
    EdInstance inst = instance(1.0, 0.1, 6, 20);
    CHECK_THROWS_AS(inst.validate(), CapExceeded);
    CHECK_THROWS_AS(ed_ground_state(inst), CapExceeded);
    CHECK(instance(1.0, 0.1, 3, 10).dim() == 2662);
}

TEST_CASE("variational energies bound the exact ground state")
{
    for (double s : {0.5, 1.0}) {
        const auto inst = instance(s, 0.2);
        const auto rows = upper_bound_report(inst, {s, 0.2});
        REQUIRE(rows.size() == 3);
        for (const auto& r : rows) {
            CHECK(r.ok);
            CHECK(r.gap >= -1e-9);
        }
        CHECK(rows[2].gap <= rows[0].gap + 1e-12);
        CHECK(rows[2].gap <= rows[1].gap + 1e-12);
    }
    const auto zero = upper_bound_report(instance(1.0, 0.0), {1.0, 0.0});
    for (const auto& r : zero) CHECK(std::abs(r.gap) < 1e-10);
}

TEST_CASE("discrete energies converge to the continuum")
{
    const BathParams p{1.0, 0.3, 0.1};
    const ContinuumSums cs(p);
    const EdInstance inst{discretize_bath(p, Scheme::linear, 256), 0.1, 1};
    const double sh = variational_energy_discrete(inst, Method::SH, {1.0, 0.3});
    CHECK(sh == doctest::Approx(solve_sh(cs, 0.1).energy).epsilon(5e-3));
    const double sup = variational_energy_discrete(inst, Method::Superposed, {1.0, 0.3});
    CHECK(sup == doctest::Approx(minimize_tau(cs, 0.1, 1.0).best.energy).epsilon(5e-3));
    CHECK(sup <= sh);
}
