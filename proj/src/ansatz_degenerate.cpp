#include "sbqcp/ansatz_degenerate.hpp"

#include <cmath>
#include <limits>

#include "sbqcp/errors.hpp"

namespace sbqcp {

const char* to_string(Branch b) { return b == Branch::broken ? "broken" : "symmetric"; }

double DegenerateSolution::u_plus() const { return std::sqrt(0.5 * (1.0 + M)); }
double DegenerateSolution::u_minus() const { return std::sqrt(0.5 * (1.0 - M)); }

namespace {

double m_condition(const BathSums& bath, double W) { return 2.0 * W * bath.eval(W, 0.0, kJd).jd - 1.0; }

DegenerateSolution symmetric_solution(const BathSums& bath, double delta, const ShOptions& opt)
{
    const auto sh = solve_sh(bath, delta, opt);
    DegenerateSolution sol;
    sol.eta = sh.eta0;
    sol.W = sh.eta0 * delta;
    sol.M = 0.0;
    sol.energy = sh.energy;
    sol.branch = Branch::symmetric;
    return sol;
}

}  // namespace

DegenerateSolution solve_degenerate(const BathSums& bath, double delta, Branch branch, const ShOptions& opt)
{
    if (branch == Branch::symmetric) return symmetric_solution(bath, delta, opt);
    if (bath.alpha() == 0.0 || delta == 0.0) throw NoSolution("broken branch absent");

    // Outer bracketing on the M-condition, scanning down from W_max.
    // At large W the condition decays like 2 alpha / (s W), so doubling terminates.
    double hi = 10.0 * delta + 1.0;
    while (m_condition(bath, hi) >= 0.0) {
        hi *= 2.0;
        if (hi > 1e12) throw NoSolution("broken branch: M-condition not bracketed");
    }
    double lo = hi;
    bool found = false;
    while (lo > 1e-14 * delta) {
        lo = 0.5 * hi;
        const double g = m_condition(bath, lo);
        if (g > 0.0) {
            found = true;
            break;
        }
        hi = lo;
    }
    if (!found) throw NoSolution("broken branch: no root of 2 alpha W Jd(W) = 1");

    double llo = std::log(lo), lhi = std::log(hi);
    while (lhi - llo > 1e-15 * std::max(1.0, std::abs(lhi))) {
        const double mid = 0.5 * (llo + lhi);
        if (mid <= llo || mid >= lhi) break;
        if (m_condition(bath, std::exp(mid)) > 0.0)
            llo = mid;
        else
            lhi = mid;
    }
    const double W = std::exp(0.5 * (llo + lhi));
    const auto k = bath.eval(W, 0.0, kI1 | kJd | kK);
    const double eta = std::exp(-k.i1);
    const double ratio = eta * delta / W;
    const double m2 = 1.0 - ratio * ratio;
    if (!(m2 > 0.0)) throw NoSolution("broken branch: M^2 <= 0 at the M-condition root");

    DegenerateSolution sol;
    sol.eta = eta;
    sol.W = W;
    sol.M = std::sqrt(m2);
    sol.branch = Branch::broken;
    sol.energy = -0.5 * W - k.k + 0.5 * m2 * W * W * k.jd;
    return sol;
}

DegenerateSolution solve_degenerate(const BathParams& p, Branch branch, const QuadratureConfig& cfg)
{
    p.validate();
    const ContinuumSums bath(p, cfg);
    return solve_degenerate(bath, p.delta, branch);
}

DegenerateSolution degenerate_ground(const BathSums& bath, double delta)
{
    const auto sym = solve_degenerate(bath, delta, Branch::symmetric);
    try {
        const auto broken = solve_degenerate(bath, delta, Branch::broken);
        if (broken.energy < sym.energy) return broken;
    } catch (const NoSolution&) {
    }
    return sym;
}

double degenerate_energy(const DegenerateSolution& sol, const BathSums& bath)
{
    if (sol.W == 0.0) return -bath.k_at_zero();
    const auto k = bath.eval(sol.W, 0.0, kJd | kK);
    return -0.5 * sol.W - k.k + 0.5 * sol.M * sol.M * sol.W * sol.W * k.jd;
}

double degenerate_energy(const DegenerateSolution& sol, const BathParams& p, const QuadratureConfig& cfg)
{
    p.validate();
    const ContinuumSums bath(p, cfg);
    return degenerate_energy(sol, bath);
}

DegenerateResiduals degenerate_residuals(const DegenerateSolution& sol, const BathSums& bath, double delta)
{
    DegenerateResiduals r;
    if (sol.W == 0.0) return r;
    const auto k = bath.eval(sol.W, 0.0, kI1 | kJd);
    r.eta = sol.eta - std::exp(-k.i1);
    r.m = sol.branch == Branch::broken ? 2.0 * sol.W * k.jd - 1.0 : 0.0;
    r.w = sol.W - sol.eta * delta / std::sqrt(1.0 - sol.M * sol.M);
    return r;
}

OverlapValue constant_phi_overlap(const DegenerateSolution& sol, const BathParams& p, const QuadratureConfig& cfg)
{
    if (sol.M == 0.0) return {false, 1.0};
    const auto d = bath_moment(p, MomentKind::D, sol.W, 0.0, cfg);
    if (d.divergent) return {true, 0.0};
    return {false, std::exp(-p.alpha * sol.M * sol.M * sol.W * sol.W * d.value)};
}

QcpResult degenerate_alpha_c(const BathParams& p, const QuadratureConfig& cfg)
{
    p.validate();
    if (p.s > 1.0) throw NoTransition("degenerate_alpha_c: no transition for s > 1");

    QcpResult res;
    res.s = p.s;
    res.delta = p.delta;
    res.method = Method::Degenerate;
    res.criterion = "2 alpha W0 Jd(W0) = 1 at the SH fixed point";
    res.alpha_c_extrapolated = std::numeric_limits<double>::quiet_NaN();

    // Reduced condition; ties belong to the symmetric side.
    auto reduced = [&](double alpha, double& value) {
        BathParams q = p;
        q.alpha = alpha;
        const ContinuumSums bath(q, cfg);
        const auto sh = solve_sh(bath, q.delta);
        if (sh.eta0 == 0.0) {
            value = std::numeric_limits<double>::infinity();
            return true;
        }
        value = m_condition(bath, sh.eta0 * q.delta);
        return value > 0.0;
    };
    // Full comparison: broken branch exists and lies strictly lower.
    auto full = [&](double alpha, double& value) {
        BathParams q = p;
        q.alpha = alpha;
        const ContinuumSums bath(q, cfg);
        const auto sym = solve_degenerate(bath, q.delta, Branch::symmetric);
        try {
            const auto broken = solve_degenerate(bath, q.delta, Branch::broken);
            value = broken.energy - sym.energy;
            return value < 0.0;
        } catch (const NoSolution&) {
            value = std::numeric_limits<double>::quiet_NaN();
            return false;
        }
    };

    auto bisect = [&](auto&& pred, bool record, double& lo_out, double& hi_out) {
        double lo = 0.0, hi = 0.05, v = 0.0;
        while (true) {
            const bool above = pred(hi, v);
            if (record) res.diagnostics.push_back({hi, above, v});
            if (above) break;
            lo = hi;
            hi *= 2.0;
            if (hi > 64.0) throw NoTransition("degenerate_alpha_c: no onset up to alpha = 64");
        }
        while (hi - lo > 5e-6) {
            const double mid = 0.5 * (lo + hi);
            const bool above = pred(mid, v);
            if (record) res.diagnostics.push_back({mid, above, v});
            (above ? hi : lo) = mid;
        }
        lo_out = lo;
        hi_out = hi;
    };

    double lo = 0.0, hi = 0.0;
    bisect(reduced, true, lo, hi);
    res.alpha_lo = lo;
    res.alpha_hi = hi;
    res.alpha_c = hi;
    res.alpha_c_threshold = hi;

    double flo = 0.0, fhi = 0.0;
    bisect(full, false, flo, fhi);
    res.alpha_c_cross_check = fhi;
    const bool agree = std::abs(fhi - hi) <= 2.0 * (hi - lo) + 1e-5;
    res.note = agree ? "reduced and full-energy criteria agree within the bracket"
                     : "reduced and full-energy criteria disagree";
    return res;
}

}  // namespace sbqcp
