#include "sbqcp/ansatz_sh.hpp"

#include <cmath>
#include <limits>

#include "sbqcp/errors.hpp"
#include "sbqcp/numerics.hpp"

namespace sbqcp {

const char* to_string(Method m)
{
    switch (m) {
    case Method::SH: return "SH";
    case Method::Degenerate: return "Degenerate";
    case Method::Superposed: return "Superposed";
    }
    return "?";
}

namespace {

// Map in lambda = ln eta: T(lambda) = -alpha I1(Delta e^lambda), with slope
// T'(lambda) = 2 alpha W int w^s/(w+W)^3.
struct LogMap {
    const BathSums& bath;
    double delta;

    void operator()(double lam, double& F, double& slope) const
    {
        const double W = delta * std::exp(lam);
        const auto k = bath.eval(W, 0.0, kI1 | kI1p);
        F = -k.i1 - lam;
        slope = 2.0 * W * k.i1p;
    }
};

}  // namespace

ShSolution solve_sh(const BathSums& bath, double delta, const ShOptions& opt)
{
    ShSolution sol;
    if (bath.alpha() == 0.0) {
        sol.eta0 = 1.0;
        sol.converged = true;
        sol.energy = -0.5 * delta;
        return sol;
    }
    if (delta == 0.0) {
        sol.eta0 = 0.0;
        sol.converged = true;
        sol.energy = -bath.k_at_zero();
        return sol;
    }

    const LogMap map{bath, delta};
    const double lam_floor = std::log(opt.eta_floor);

    double lam_u = 0.0, F_u = 0.0, T_u = 0.0;
    map(lam_u, F_u, T_u);
    double lam_lo = 0.0;
    bool have_lo = false;

    // lam_u stays on or above the largest fixed point throughout: plain
    // iteration from above is monotone, and Newton candidates are only kept
    // when they are certified to lie on the upper side.
    for (int it = 1; it <= opt.max_iter; ++it) {
        sol.iterations = it;
        const bool bracket_tight = have_lo && (lam_u - lam_lo) < 1e-15 * std::max(1.0, std::abs(lam_u));
        if (std::abs(F_u) < opt.tol || bracket_tight) {
            sol.eta0 = std::exp(lam_u);
            sol.slope = T_u;
            sol.converged = true;
            sol.energy = sh_energy(bath, delta, sol.eta0);
            return sol;
        }
        if (lam_u < lam_floor) {
            sol.eta0 = 0.0;
            sol.converged = true;
            sol.energy = sh_energy(bath, delta, 0.0);
            return sol;
        }

        double c;
        bool plain = false;
        if (have_lo) {
            c = lam_u - F_u / (T_u - 1.0);
            if (!(c > lam_lo && c < lam_u)) c = 0.5 * (lam_lo + lam_u);
        } else if (T_u < 1.0) {
            c = lam_u - F_u / (T_u - 1.0);
        } else {
            c = lam_u + F_u;
            plain = true;
        }
        if (!have_lo && c < lam_floor - 0.5) c = lam_floor - 0.5;

        double F_c = 0.0, T_c = 0.0;
        map(c, F_c, T_c);
        if (F_c > 0.0) {
            lam_lo = c;
            have_lo = true;
        } else if (plain || have_lo || T_c < 1.0) {
            lam_u = c;
            F_u = F_c;
            T_u = T_c;
        } else {
            // Newton jumped below the unstable root; fall back to a plain step.
            lam_u = lam_u + F_u;
            map(lam_u, F_u, T_u);
        }
    }
    throw NonConverged("solve_sh: fixed-point iteration did not converge");
}

ShSolution solve_sh(const BathParams& p, const QuadratureConfig& cfg, const ShOptions& opt)
{
    p.validate();
    const ContinuumSums bath(p, cfg);
    return solve_sh(bath, p.delta, opt);
}

double sh_energy(const BathSums& bath, double delta, double eta0)
{
    if (eta0 < 0.0 || eta0 > 1.0) throw DomainError("sh_energy: eta0 must lie in [0, 1]");
    const double W = eta0 * delta;
    if (W == 0.0) return -bath.k_at_zero();
    return -0.5 * W - bath.eval(W, 0.0, kK).k;
}

double sh_energy(const BathParams& p, double eta0, const QuadratureConfig& cfg)
{
    p.validate();
    const ContinuumSums bath(p, cfg);
    return sh_energy(bath, p.delta, eta0);
}

double sh_functional(const BathSums& bath, double delta, double W)
{
    const auto k = bath.eval(W, 0.0, kI1 | kK);
    return -0.5 * delta * std::exp(-k.i1) - k.k;
}

QcpResult sh_alpha_c(const BathParams& p, const QuadratureConfig& cfg, const ShOptions& opt)
{
    p.validate();
    if (p.s > 1.0) throw NoTransition("sh_alpha_c: no transition for s > 1");

    QcpResult res;
    res.s = p.s;
    res.delta = p.delta;
    res.method = Method::SH;
    res.criterion = "eta0 fixed point disappears";
    res.alpha_c_cross_check = std::numeric_limits<double>::quiet_NaN();

    auto eta_at = [&](double alpha) {
        BathParams q = p;
        q.alpha = alpha;
        return solve_sh(q, cfg, opt).eta0;
    };

    double lo = 0.0, hi = 0.05;
    double eta_lo = 1.0;
    while (true) {
        const double e = eta_at(hi);
        res.diagnostics.push_back({hi, e == 0.0, e});
        if (e == 0.0) break;
        lo = hi;
        eta_lo = e;
        hi *= 2.0;
        if (hi > 64.0) throw NoTransition("sh_alpha_c: eta0 stays finite up to alpha = 64");
    }
    while (hi - lo > 5e-6) {
        const double mid = 0.5 * (lo + hi);
        const double e = eta_at(mid);
        res.diagnostics.push_back({mid, e == 0.0, e});
        if (e == 0.0) {
            hi = mid;
        } else {
            lo = mid;
            eta_lo = e;
        }
    }
    res.alpha_lo = lo;
    res.alpha_hi = hi;
    res.alpha_c_threshold = hi;

    if (eta_lo > 1e-6) {
        // Tangency: eta0 jumps from a finite value to zero.
        res.alpha_c_extrapolated = std::numeric_limits<double>::quiet_NaN();
        res.alpha_c = hi;
        res.note = "discontinuous (tangency) disappearance";
    } else {
        // Continuous vanishing: extrapolate 1/ln(1/eta0) to zero.
        std::vector<double> xs, ys;
        const double h = 0.01 * lo;
        for (int k = 2; k >= 0; --k) {
            const double a = lo - k * h;
            const double e = eta_at(a);
            xs.push_back(a);
            ys.push_back(1.0 / std::log(1.0 / e));
        }
        res.alpha_c_extrapolated = extrapolate_zero(xs, ys);
        res.alpha_c = res.alpha_c_extrapolated;
        res.note = "continuous vanishing; alpha_c from extrapolated 1/ln(1/eta0)";
    }
    return res;
}

}  // namespace sbqcp
