#include "sbqcp/ansatz_superposed.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "sbqcp/ansatz_degenerate.hpp"
#include "sbqcp/ansatz_sh.hpp"
#include "sbqcp/errors.hpp"

namespace sbqcp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRhoSingular = 1e-12;

using Vec2 = std::array<double, 2>;

double norm_inf(const Vec2& v) { return std::max(std::abs(v[0]), std::abs(v[1])); }

// Newton on R(x) = 0 with a forward-difference Jacobian and backtracking.
// eval returns false when x lies outside the admissible region.
template <class Eval>
bool newton2(Eval&& eval, Vec2& x, double tol, int max_iter, int& iterations)
{
    Vec2 r{};
    if (!eval(x, r)) return false;
    for (int it = 0; it < max_iter; ++it) {
        iterations = it;
        if (norm_inf(r) < tol) return true;

        double J[2][2];
        for (int j = 0; j < 2; ++j) {
            Vec2 xh = x;
            const double h = 1e-7 * std::max(1.0, std::abs(x[j]));
            xh[j] += h;
            Vec2 rh{};
            if (!eval(xh, rh)) {
                xh[j] = x[j] - h;
                if (!eval(xh, rh)) return false;
                J[0][j] = (r[0] - rh[0]) / h;
                J[1][j] = (r[1] - rh[1]) / h;
            } else {
                J[0][j] = (rh[0] - r[0]) / h;
                J[1][j] = (rh[1] - r[1]) / h;
            }
        }
        const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
        if (!std::isfinite(det) || det == 0.0) return false;
        Vec2 dx{-(J[1][1] * r[0] - J[0][1] * r[1]) / det, -(-J[1][0] * r[0] + J[0][0] * r[1]) / det};
        const double len = norm_inf(dx);
        if (!std::isfinite(len)) return false;
        if (len > 3.0) {
            dx[0] *= 3.0 / len;
            dx[1] *= 3.0 / len;
        }

        const double r0 = norm_inf(r);
        bool accepted = false;
        for (double t = 1.0; t > 1e-4; t *= 0.5) {
            const Vec2 xn{x[0] + t * dx[0], x[1] + t * dx[1]};
            Vec2 rn{};
            if (eval(xn, rn) && norm_inf(rn) < (1.0 - 1e-4 * t) * r0) {
                x = xn;
                r = rn;
                accepted = true;
                break;
            }
        }
        if (!accepted) return norm_inf(r) < 1e3 * tol;
    }
    iterations = max_iter;
    return norm_inf(r) < tol;
}

SuperposedSolution alpha_zero_state(double delta)
{
    SuperposedSolution st;
    st.tau = 0.0;
    st.rho = 1.0;
    st.eta = 1.0;
    st.W = delta;
    st.M = 0.0;
    st.E0 = st.U = st.energy = -0.5 * delta;
    st.delta_shift = std::numeric_limits<double>::quiet_NaN();
    st.a = std::numeric_limits<double>::quiet_NaN();
    st.A = 0.5;
    st.converged = true;
    st.note = "alpha = 0, analytic";
    return st;
}

SuperposedSolution sh_limit_state(const BathSums& bath, double delta)
{
    const auto sh = solve_sh(bath, delta);
    SuperposedSolution st;
    st.tau = 0.0;
    st.rho = 1.0;
    st.eta = sh.eta0;
    st.W = sh.eta0 * delta;
    st.E0 = st.U = st.energy = sh.energy;
    st.delta_shift = std::numeric_limits<double>::quiet_NaN();
    st.a = std::numeric_limits<double>::quiet_NaN();
    st.A = 0.5;
    st.converged = true;
    st.note = "tau -> 0 limit (SH state)";
    return st;
}

SuperposedSolution degenerate_limit_state(const DegenerateSolution& d, const BathSums& bath)
{
    SuperposedSolution st;
    st.tau = d.M;
    st.rho = 0.0;
    st.a = 0.0;
    st.delta_shift = std::numeric_limits<double>::quiet_NaN();
    st.eta = d.eta;
    st.W = d.W;
    st.M = d.M;
    const auto k = bath.eval(d.W, 0.0, kJd | kK);
    st.Y = 0.5 * d.M * d.M * d.W * d.W * k.jd;
    st.E0 = d.energy;
    st.U = std::numeric_limits<double>::quiet_NaN();
    st.energy = d.energy;
    st.A = std::sqrt(0.5);
    st.converged = true;
    st.collapsed = true;
    st.note = "rho = 0 limit (degenerate state)";
    return st;
}

}  // namespace

double SuperposedSolution::u_plus() const { return std::sqrt(0.5 * (1.0 + M)); }
double SuperposedSolution::u_minus() const { return std::sqrt(0.5 * (1.0 - M)); }

double hyperbolic_bracket(double M) { return std::cosh(M) - 1.0 - M * (std::sinh(M) - M); }

double compute_E0(const BathSums& bath, double delta, const SuperposedSolution& st)
{
    (void)delta;
    const auto k = bath.eval(st.W, st.a, kI3 | kK);
    const double Y = 0.5 * st.tau * st.tau * st.W * st.W * k.i3;
    return -0.5 * st.W - k.k + Y;
}

double compute_U(const BathSums& bath, double delta, const SuperposedSolution& st)
{
    if (!(std::abs(st.M) < 1.0)) throw DomainError("compute_U: |M| must be < 1");
    const auto k = bath.eval(st.W, st.a, kI3 | kK);
    const double Y = 0.5 * st.tau * st.tau * st.W * st.W * k.i3;
    const double sq = std::sqrt(1.0 - st.M * st.M);
    const double ed = st.eta * delta;
    return sq * (-ed * ed / (2.0 * st.W) - k.k - Y) - 0.5 * ed * hyperbolic_bracket(st.M);
}

DeltaValue compute_delta(const SuperposedSolution& st)
{
    if (st.rho >= 1.0 - kRhoSingular) throw SingularDenominator("compute_delta: rho too close to 1");
    const double sq = std::sqrt(1.0 - st.M * st.M);
    DeltaValue d;
    d.value = 2.0 * (st.E0 * sq - st.U) / ((1.0 - st.rho) * (1.0 + st.rho * sq));
    d.non_positive = !(d.value > 0.0);
    return d;
}

double compute_rho(const BathSums& bath, const SuperposedSolution& st)
{
    if (st.tau == 0.0 || bath.alpha() == 0.0) return 1.0;
    const auto k = bath.eval(st.W, st.a, kI4);
    return std::exp(-st.tau * st.tau * st.W * st.W * k.i4);
}

double compute_E0(const BathParams& p, const SuperposedSolution& st, const QuadratureConfig& cfg)
{
    return compute_E0(ContinuumSums(p, cfg), p.delta, st);
}

double compute_U(const BathParams& p, const SuperposedSolution& st, const QuadratureConfig& cfg)
{
    return compute_U(ContinuumSums(p, cfg), p.delta, st);
}

double compute_rho(const BathParams& p, const SuperposedSolution& st, const QuadratureConfig& cfg)
{
    return compute_rho(ContinuumSums(p, cfg), st);
}

SuperposedMap superposed_map(const BathSums& bath, double delta, double tau, double W, double a)
{
    SuperposedMap out;
    auto& st = out.state;
    st.tau = tau;
    st.W = W;
    st.a = a;
    if (!(W > 0.0) || !(a > 0.0) || !std::isfinite(W) || !std::isfinite(a)) return out;

    const auto k = bath.eval(W, a, kI1 | kI2 | kI3 | kI4 | kK);
    st.eta = std::exp(-k.i1);
    st.M = 2.0 * tau * W * k.i2;
    if (!(st.M < 1.0)) return out;
    const double sq = std::sqrt(1.0 - st.M * st.M);
    const double X = tau * tau * W * W * k.i4;
    st.rho = std::exp(-X);
    const double one_minus_rho = -std::expm1(-X);
    st.Y = 0.5 * tau * tau * W * W * k.i3;
    st.E0 = -0.5 * W - k.k + st.Y;
    const double ed = st.eta * delta;
    st.U = sq * (-ed * ed / (2.0 * W) - k.k - st.Y) - 0.5 * ed * hyperbolic_bracket(st.M);
    st.energy = (st.E0 + st.rho * st.U) / (1.0 + st.rho * sq);
    st.A = 1.0 / std::sqrt(2.0 * (1.0 + st.rho * sq));
    if (one_minus_rho < kRhoSingular) return out;
    st.delta_shift = 2.0 * (st.E0 * sq - st.U) / (one_minus_rho * (1.0 + st.rho * sq));
    if (!(st.delta_shift > 0.0) || !std::isfinite(st.delta_shift)) return out;

    out.log_next_W = -k.i1 + std::log(delta) - 0.5 * std::log1p(-st.M * st.M);
    out.log_next_a = -X + std::log(st.delta_shift);
    out.valid = std::isfinite(out.log_next_W) && std::isfinite(out.log_next_a);
    return out;
}

std::optional<SuperposedSolution> newton_inner(const BathSums& bath, double delta, double tau, double log_W,
                                               double log_a, const InnerOptions& opt)
{
    auto eval = [&](const Vec2& x, Vec2& r) {
        if (x[1] < opt.min_log_a || x[0] > 5.0 || x[1] > 5.0) return false;
        const auto m = superposed_map(bath, delta, tau, std::exp(x[0]), std::exp(x[1]));
        if (!m.valid) return false;
        r = {m.log_next_W - x[0], m.log_next_a - x[1]};
        return true;
    };
    Vec2 x{log_W, log_a};
    int iterations = 0;
    if (!newton2(eval, x, opt.tol, opt.newton_iter, iterations)) return std::nullopt;
    auto m = superposed_map(bath, delta, tau, std::exp(x[0]), std::exp(x[1]));
    if (!m.valid) return std::nullopt;
    m.state.converged = true;
    m.state.iterations = iterations;
    return m.state;
}

std::optional<SuperposedSolution> collapsed_inner(const BathSums& bath, double delta, double tau)
{
    if (!bath.infrared_divergent_i4() || bath.alpha() == 0.0 || delta == 0.0) return std::nullopt;

    // Residual in ln W of W = eta Delta / sqrt(1 - M^2) with M = 2 alpha tau W Jd(W).
    auto resid = [&](double lw, double& r) {
        const double W = std::exp(lw);
        const auto k = bath.eval(W, 0.0, kI1 | kJd);
        const double M = 2.0 * tau * W * k.jd;
        if (!(M < 1.0)) return false;
        r = -k.i1 + std::log(delta) - 0.5 * std::log1p(-M * M) - lw;
        return true;
    };

    std::optional<SuperposedSolution> best;
    double hi = std::log(10.0 * delta + 1.0);
    double r_hi = 0.0;
    bool ok_hi = resid(hi, r_hi);
    for (double lo = hi - 0.5; lo > std::log(delta) - 60.0; lo -= 0.5) {
        double r_lo = 0.0;
        const bool ok_lo = resid(lo, r_lo);
        if (ok_hi && ok_lo && (r_lo > 0.0) != (r_hi > 0.0)) {
            double a = lo, b = hi, ra = r_lo;
            for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(a)); ++it) {
                const double mid = 0.5 * (a + b);
                double rm = 0.0;
                if (!resid(mid, rm)) break;
                if ((rm > 0.0) == (ra > 0.0)) {
                    a = mid;
                    ra = rm;
                } else {
                    b = mid;
                }
            }
            const double W = std::exp(0.5 * (a + b));
            const auto k = bath.eval(W, 0.0, kI1 | kJd | kK);
            SuperposedSolution st;
            st.tau = tau;
            st.W = W;
            st.a = 0.0;
            st.rho = 0.0;
            st.eta = std::exp(-k.i1);
            st.M = 2.0 * tau * W * k.jd;
            st.Y = 0.5 * tau * tau * W * W * k.jd;
            st.E0 = -0.5 * W - k.k + st.Y;
            st.U = std::numeric_limits<double>::quiet_NaN();
            st.energy = st.E0;
            st.delta_shift = std::numeric_limits<double>::quiet_NaN();
            st.A = std::sqrt(0.5);
            st.converged = true;
            st.collapsed = true;
            st.note = "collapsed to rho = 0";
            if (!best || st.energy < best->energy) best = st;
        }
        hi = lo;
        r_hi = r_lo;
        ok_hi = ok_lo;
    }
    return best;
}

SuperposedSolution solve_inner(const BathSums& bath, double delta, double tau,
                               const std::optional<std::pair<double, double>>& warm, const InnerOptions& opt)
{
    if (bath.alpha() == 0.0) return alpha_zero_state(delta);
    if (!(tau > 0.0)) throw DomainError("solve_inner: tau must be > 0");

    Vec2 x{};
    if (warm) {
        x = {std::log(warm->first), std::log(warm->second)};
    } else {
        const auto sh = solve_sh(bath, delta);
        const double w0 = sh.eta0 > 0.0 ? sh.eta0 * delta : 1e-3 * delta;
        x = {std::log(w0), std::log(w0)};
    }

    if (auto st = newton_inner(bath, delta, tau, x[0], x[1], opt)) return *st;

    // Damped fixed-point iteration in log variables.
    double lambda = 1.0;
    double prev = kInf;
    int low_rho = 0;
    for (int it = 0; it < opt.max_iter; ++it) {
        if (x[1] < opt.min_log_a) break;
        const auto m = superposed_map(bath, delta, tau, std::exp(x[0]), std::exp(x[1]));
        if (!m.valid) {
            lambda *= 0.5;
            if (lambda < std::ldexp(1.0, -10)) break;
            continue;
        }
        const Vec2 r{m.log_next_W - x[0], m.log_next_a - x[1]};
        const double n = norm_inf(r);
        if (n < opt.tol) {
            auto st = m.state;
            st.converged = true;
            st.iterations = it;
            return st;
        }
        low_rho = m.state.rho < 1e-8 ? low_rho + 1 : 0;
        if (low_rho >= 100) break;
        if (n > prev) {
            lambda *= 0.5;
            if (lambda < std::ldexp(1.0, -10)) throw NonConverged("solve_inner: damping exhausted");
        }
        prev = n;
        x[0] += lambda * r[0];
        x[1] += lambda * r[1];
    }
    if (auto c = collapsed_inner(bath, delta, tau)) return *c;
    throw NonConverged("solve_inner: no self-consistent state");
}

SuperposedSolution solve_inner(const BathParams& p, double tau, const std::optional<std::pair<double, double>>& warm,
                               const QuadratureConfig& cfg)
{
    p.validate();
    const ContinuumSums bath(p, cfg);
    return solve_inner(bath, p.delta, tau, warm);
}

std::vector<SuperposedSolution> find_branches(const BathSums& bath, double delta, double tau,
                                              const std::vector<std::pair<double, double>>& extra_seeds,
                                              bool use_lattice, const InnerOptions& opt)
{
    std::vector<std::pair<double, double>> seeds = extra_seeds;
    if (use_lattice) {
        const double w_lo = std::log(std::min(1e-3, 0.1 * delta));
        for (int i = 0; i < 6; ++i) {
            const double lw = w_lo + (0.0 - w_lo) * i / 5.0;
            for (int j = 0; j < 8; ++j) {
                const double la = std::log(1e-20) + (0.0 - std::log(1e-20)) * j / 7.0;
                seeds.emplace_back(lw, la);
            }
        }
    }

    std::vector<SuperposedSolution> found;
    for (const auto& [lw, la] : seeds) {
        const auto st = newton_inner(bath, delta, tau, lw, la, opt);
        if (!st) continue;
        const double lW = std::log(st->W), lA = std::log(st->a);
        const bool dup = std::any_of(found.begin(), found.end(), [&](const SuperposedSolution& f) {
            return std::abs(std::log(f.W) - lW) < 1e-6 && std::abs(std::log(f.a) - lA) < 1e-6 * std::max(1.0, std::abs(lA));
        });
        if (!dup) found.push_back(*st);
    }
    std::stable_sort(found.begin(), found.end(),
                     [](const SuperposedSolution& a, const SuperposedSolution& b) { return a.energy < b.energy; });
    return found;
}

double tau_max_for(double s, double alpha, const TauOptions& opt)
{
    if (s == 1.0) return alpha > 0.0 ? std::min(1.0, (1.0 - 1e-6) / std::sqrt(alpha)) : 1.0;
    return opt.tau_cap;
}

TauSearch minimize_tau(const BathSums& bath, double delta, double s, const TauOptions& opt)
{
    TauSearch out;
    if (bath.alpha() == 0.0) {
        out.best = out.nondegenerate = alpha_zero_state(delta);
        out.has_nondegenerate = true;
        out.minima.emplace_back(0.0, out.best.energy);
        return out;
    }

    const double tau_max = tau_max_for(s, bath.alpha(), opt);
    std::vector<double> taus{0.25 * opt.tau_step, 0.5 * opt.tau_step};
    for (double t = opt.tau_step; t < tau_max - 1e-9; t += opt.tau_step) taus.push_back(t);
    taus.push_back(tau_max);
    taus.erase(std::remove_if(taus.begin(), taus.end(), [&](double t) { return t < opt.tau_min || t > tau_max; }),
               taus.end());

    const auto sh = solve_sh(bath, delta);
    const double w0 = sh.eta0 > 0.0 ? sh.eta0 * delta : 1e-3 * delta;
    const std::pair<double, double> sh_seed{std::log(w0), std::log(w0)};

    // The small-rho branch sits next to the broken degenerate state.
    std::optional<DegenerateSolution> broken;
    if (bath.infrared_divergent_i4()) {
        try {
            broken = solve_degenerate(bath, delta, Branch::broken);
        } catch (const NoSolution&) {
        }
    }
    std::vector<std::pair<double, double>> broken_seeds;
    if (broken) {
        for (double la : {-40.0, -30.0, -20.0, -14.0, -10.0, -7.0, -5.0})
            broken_seeds.emplace_back(std::log(broken->W), la);
    }

    // Coarse scan with continuation along tau; a seed lattice at regular intervals.
    std::vector<double> emin(taus.size(), kInf);
    std::vector<std::optional<SuperposedSolution>> argmin(taus.size());
    std::vector<SuperposedSolution> prev;
    for (std::size_t i = 0; i < taus.size(); ++i) {
        std::vector<std::pair<double, double>> seeds;
        for (const auto& p : prev) seeds.emplace_back(std::log(p.W), std::log(p.a));
        seeds.push_back(sh_seed);
        const bool lattice = i == 0 || i + 1 == taus.size() || (opt.lattice_every > 0 && i % opt.lattice_every == 0);
        if (lattice) seeds.insert(seeds.end(), broken_seeds.begin(), broken_seeds.end());
        auto sols = find_branches(bath, delta, taus[i], seeds, lattice);
        if (!sols.empty()) {
            emin[i] = sols.front().energy;
            argmin[i] = sols.front();
        }
        prev = std::move(sols);
    }

    std::vector<std::size_t> local;
    for (std::size_t i = 0; i < taus.size(); ++i) {
        if (!std::isfinite(emin[i])) continue;
        const bool left = i == 0 || emin[i] < emin[i - 1];
        const bool right = i + 1 == taus.size() || emin[i] <= emin[i + 1];
        if (left && right) local.push_back(i);
    }
    out.multiple_minima = local.size() > 1;

    std::optional<SuperposedSolution> best_nd;
    for (const std::size_t i : local) {
        const auto ref = *argmin[i];
        const double lw = std::log(ref.W), la = std::log(ref.a);
        auto energy_at = [&](double t, std::optional<SuperposedSolution>& keep) {
            keep = newton_inner(bath, delta, t, lw, la);
            return keep ? keep->energy : kInf;
        };
        double lo = i > 0 ? taus[i - 1] : std::max(opt.tau_min, 0.5 * taus[i]);
        double hi = i + 1 < taus.size() ? taus[i + 1] : taus[i];
        const double g = 0.5 * (std::sqrt(5.0) - 1.0);
        std::optional<SuperposedSolution> s1, s2;
        double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
        double f1 = energy_at(x1, s1), f2 = energy_at(x2, s2);
        while (hi - lo > opt.tau_tol) {
            if (f1 <= f2) {
                hi = x2;
                x2 = x1;
                f2 = f1;
                s2 = s1;
                x1 = hi - g * (hi - lo);
                f1 = energy_at(x1, s1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                s1 = s2;
                x2 = lo + g * (hi - lo);
                f2 = energy_at(x2, s2);
            }
        }
        std::optional<SuperposedSolution> refined = f1 <= f2 ? s1 : s2;
        if (!refined || refined->energy > ref.energy) refined = ref;
        out.minima.emplace_back(refined->tau, refined->energy);
        if (!best_nd || refined->energy < best_nd->energy) best_nd = refined;
    }

    SuperposedSolution best = sh_limit_state(bath, delta);
    if (best_nd) {
        out.nondegenerate = *best_nd;
        out.has_nondegenerate = true;
        if (best_nd->energy < best.energy) best = *best_nd;
    }
    if (broken && broken->energy < best.energy) best = degenerate_limit_state(*broken, bath);
    out.best = best;
    return out;
}

TauSearch minimize_tau(const BathParams& p, const TauOptions& opt, const QuadratureConfig& cfg)
{
    p.validate();
    const ContinuumSums bath(p, cfg);
    return minimize_tau(bath, p.delta, p.s, opt);
}

double rho_asymptotic_s1(const BathParams& p, const SuperposedSolution& st)
{
    if (p.s != 1.0) throw DomainError("rho_asymptotic_s1: requires s = 1");
    const double at2 = p.alpha * st.tau * st.tau;
    if (at2 >= 1.0) throw DomainError("rho_asymptotic_s1: alpha tau^2 must be < 1");
    const double x = at2 / (1.0 - at2);
    if (x == 0.0) return 1.0;
    const double W = st.W;
    return std::exp(x * (std::log(st.delta_shift / W) + std::log1p(W) + (2.0 + W) / (1.0 + W)));
}

SigmaZ sigma_z_moments(const SuperposedSolution& st) { return {0.0, st.M}; }

namespace {

struct DiscreteTerms {
    double M{0.0}, X{0.0}, Y{0.0}, K{0.0};
};

DiscreteTerms discrete_terms(const DiscreteBath& bath, double W, const std::vector<double>& phi)
{
    DiscreteTerms t;
    for (std::size_t i = 0; i < bath.size(); ++i) {
        const double w = bath.frequencies[i];
        const double g2 = bath.couplings[i] * bath.couplings[i];
        const double xi = w / (w + W);
        const double c = (1.0 - xi) * (1.0 - xi);
        t.K += g2 * xi * (2.0 - xi) / (4.0 * w);
        t.M += g2 * phi[i] * c / (w * W);
        t.X += g2 * phi[i] * phi[i] * c / (2.0 * w * w);
        t.Y += g2 * phi[i] * phi[i] * c / (4.0 * w);
    }
    return t;
}

struct EnergyParts {
    double E0, U, rho, sq, energy;
};

EnergyParts energy_parts(const DiscreteTerms& t, double delta, double W, double eta)
{
    EnergyParts e{};
    e.sq = std::sqrt(1.0 - t.M * t.M);
    e.rho = std::exp(-t.X);
    e.E0 = -0.5 * W - t.K + t.Y;
    const double ed = eta * delta;
    e.U = e.sq * (-ed * ed / (2.0 * W) - t.K - t.Y) - 0.5 * ed * hyperbolic_bracket(t.M);
    e.energy = (e.E0 + e.rho * e.U) / (1.0 + e.rho * e.sq);
    return e;
}

}  // namespace

double discrete_energy_of_phi(const DiscreteBath& bath, double delta, double W, double eta,
                              const std::vector<double>& phi)
{
    if (phi.size() != bath.size()) throw DomainError("discrete_energy_of_phi: profile size mismatch");
    const auto t = discrete_terms(bath, W, phi);
    if (!(std::abs(t.M) < 1.0)) throw DomainError("discrete_energy_of_phi: |M| must be < 1");
    return energy_parts(t, delta, W, eta).energy;
}

std::vector<double> stationarity_residual(const DiscreteBath& bath, double delta, double W, double eta,
                                          const std::vector<double>& phi, double h)
{
    std::vector<double> grad(phi.size());
    std::vector<double> p = phi;
    for (std::size_t k = 0; k < phi.size(); ++k) {
        p[k] = phi[k] + h;
        const double ep = discrete_energy_of_phi(bath, delta, W, eta, p);
        p[k] = phi[k] - h;
        const double em = discrete_energy_of_phi(bath, delta, W, eta, p);
        p[k] = phi[k];
        grad[k] = (ep - em) / (2.0 * h);
    }
    return grad;
}

std::vector<double> profile_of(const DiscreteBath& bath, const SuperposedSolution& st)
{
    std::vector<double> phi(bath.size());
    for (std::size_t i = 0; i < bath.size(); ++i) {
        const double w = bath.frequencies[i];
        phi[i] = st.tau * w / (w + st.a);
    }
    return phi;
}

DiscreteProfile stationary_profile(const DiscreteBath& bath, double delta, const SuperposedSolution& st)
{
    const double W = st.W, eta = st.eta;
    auto profile = [&](double tau, double a) {
        std::vector<double> phi(bath.size());
        for (std::size_t i = 0; i < bath.size(); ++i) phi[i] = tau * bath.frequencies[i] / (bath.frequencies[i] + a);
        return phi;
    };
    // Image (tau', ln a') of the exact stationarity condition at (tau, a).
    auto image = [&](double tau, double a, double& tau_n, double& la_n, EnergyParts& parts) {
        const auto t = discrete_terms(bath, W, profile(tau, a));
        if (!(std::abs(t.M) < 1.0)) return false;
        parts = energy_parts(t, delta, W, eta);
        const double sq = parts.sq, rho = parts.rho;
        const double ed = eta * delta;
        const double P = -ed * ed / (2.0 * W) - t.K - t.Y;
        const double u_m = -t.M / sq * P - 0.5 * ed * t.M * (2.0 - std::cosh(t.M));
        const double den = 1.0 + rho * sq;
        const double e_m = (rho * u_m * den - (parts.E0 + rho * parts.U) * rho * (-t.M / sq)) / (den * den);
        const double e_y = (1.0 - rho * sq) / den;
        const double e_rho = (parts.U - sq * parts.E0) / (den * den);
        tau_n = -2.0 * e_m / (W * e_y);
        const double delta_n = -2.0 * e_rho / e_y;
        if (!(delta_n > 0.0) || !(rho > 0.0)) return false;
        la_n = std::log(rho * delta_n);
        return std::isfinite(tau_n) && std::isfinite(la_n);
    };
    auto eval = [&](const Vec2& x, Vec2& r) {
        double tn = 0.0, lan = 0.0;
        EnergyParts parts{};
        if (!image(x[0], std::exp(x[1]), tn, lan, parts)) return false;
        r = {tn - x[0], lan - x[1]};
        return true;
    };

    Vec2 x{st.tau, std::log(st.a > 0.0 ? st.a : 1e-3 * W)};
    int iterations = 0;
    DiscreteProfile out;
    out.converged = newton2(eval, x, 1e-13, 100, iterations);
    double tn = 0.0, lan = 0.0;
    EnergyParts parts{};
    image(x[0], std::exp(x[1]), tn, lan, parts);
    out.tau = x[0];
    out.phi = profile(x[0], std::exp(x[1]));
    out.rho = parts.rho;
    out.delta_shift = std::exp(x[1]) / parts.rho;
    out.energy = parts.energy;
    return out;
}

}  // namespace sbqcp
