#include "sbqcp/qcp.hpp"

#include <omp.h>

#include <cmath>
#include <functional>
#include <limits>

#include "sbqcp/ansatz_degenerate.hpp"
#include "sbqcp/ansatz_sh.hpp"
#include "sbqcp/errors.hpp"
#include "sbqcp/numerics.hpp"

namespace sbqcp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

void add_flag(std::string& flags, const std::string& f)
{
    if (!flags.empty()) flags += '|';
    flags += f;
}

struct SupProbe {
    bool has_nd{false};
    double rho{1.0};
    double e_nd{kInf};
    double e_deg{0.0};
};

SupProbe probe(const BathParams& base, double alpha, const QcpOptions& opt)
{
    BathParams q = base;
    q.alpha = alpha;
    const ContinuumSums bath(q, opt.quad);
    const auto search = minimize_tau(bath, q.delta, q.s, opt.tau);
    SupProbe r;
    r.e_deg = degenerate_ground(bath, q.delta).energy;
    if (search.has_nondegenerate) {
        r.has_nd = true;
        r.rho = search.nondegenerate.rho;
        r.e_nd = search.nondegenerate.energy;
    }
    return r;
}

// Bisection of a monotone predicate on [lo, hi]; pred(lo) false, pred(hi) true.
void bisect(const std::function<bool(double, double&)>& pred, double& lo, double& hi, double width,
            std::vector<BisectionStep>* log)
{
    double v = 0.0;
    while (hi - lo > width) {
        const double mid = 0.5 * (lo + hi);
        const bool above = pred(mid, v);
        if (log) log->push_back({mid, above, v});
        (above ? hi : lo) = mid;
    }
}

double collapse_extrapolation(const BathParams& base, double lo, const QcpOptions& opt)
{
    std::vector<double> xs, ys;
    for (int k = 2; k >= 0; --k) {
        const double a = lo * (1.0 - 0.01 * k);
        const auto r = probe(base, a, opt);
        if (!r.has_nd || !(r.rho > 0.0) || r.rho >= 1.0) continue;
        xs.push_back(a);
        ys.push_back(1.0 / std::log(1.0 / r.rho));
    }
    if (xs.size() < 2) return kNaN;
    return extrapolate_zero(xs, ys);
}

QcpResult superposed_alpha_c(const BathParams& p, const QcpOptions& opt)
{
    if (p.s > 1.0) throw NoTransition("superposed: no transition for s > 1");

    QcpResult res;
    res.s = p.s;
    res.delta = p.delta;
    res.method = Method::Superposed;
    res.alpha_c_cross_check = kNaN;

    const auto deg = degenerate_alpha_c(p, opt.quad);
    double sh_c = 0.75;
    try {
        sh_c = sh_alpha_c(p, opt.quad).alpha_c;
    } catch (const NoTransition&) {
    }
    const double lo0 = deg.alpha_lo;
    const double hi0 = std::min(2.0 * sh_c, 1.5);

    auto collapsed = [&](double a, double& v) {
        const auto r = probe(p, a, opt);
        v = r.has_nd ? r.rho : 0.0;
        return !r.has_nd || r.rho < opt.eps_rho;
    };
    auto crossed = [&](double a, double& v) {
        const auto r = probe(p, a, opt);
        v = r.e_nd - r.e_deg;
        return !r.has_nd || r.e_deg < r.e_nd;
    };

    auto run = [&](const std::function<bool(double, double&)>& pred, std::vector<BisectionStep>* log, double& lo,
                   double& hi) {
        lo = lo0;
        hi = hi0;
        double v = 0.0;
        if (pred(lo, v)) throw NoTransition("superposed: criterion already met at the lower bracket end");
        if (log) log->push_back({lo, false, v});
        if (!pred(hi, v)) throw NoTransition("superposed: criterion not met at the upper bracket end");
        if (log) log->push_back({hi, true, v});
        bisect(pred, lo, hi, opt.bracket_width, log);
    };

    if (p.s == 1.0) {
        double lo = 0.0, hi = 0.0;
        run(collapsed, &res.diagnostics, lo, hi);
        res.alpha_c_threshold = hi;
        res.alpha_c_extrapolated = collapse_extrapolation(p, lo, opt);
        res.criterion = "rho < eps_rho, extrapolated zero of 1/ln(1/rho)";
        const bool ext_ok = std::isfinite(res.alpha_c_extrapolated) && res.alpha_c_extrapolated >= lo;
        res.alpha_c = ext_ok ? res.alpha_c_extrapolated : hi;
        res.alpha_lo = ext_ok ? res.alpha_c - opt.bracket_width : lo;
        res.alpha_hi = ext_ok ? res.alpha_c : hi;
        res.note = ext_ok ? "alpha_c is the extrapolated collapse point" : "extrapolation failed; threshold reported";
        return res;
    }

    double lo = 0.0, hi = 0.0;
    run(crossed, &res.diagnostics, lo, hi);
    res.alpha_lo = lo;
    res.alpha_hi = hi;
    res.alpha_c = hi;
    res.criterion = "E_nondegenerate = E_degenerate crossing";
    res.alpha_c_threshold = kNaN;
    res.alpha_c_extrapolated = kNaN;
    if (opt.rho_criterion_sub_ohmic) {
        double clo = 0.0, chi = 0.0;
        try {
            run(collapsed, nullptr, clo, chi);
            res.alpha_c_threshold = chi;
            res.alpha_c_extrapolated = collapse_extrapolation(p, clo, opt);
            res.note = "threshold/extrapolated columns use rho < eps_rho on the lowest rho > 0 state";
        } catch (const NoTransition& e) {
            res.note = std::string("rho criterion: ") + e.what();
        }
    }
    return res;
}

}  // namespace

ScanRecord scan_point(const BathParams& p, const QcpOptions& opt)
{
    ScanRecord r;
    r.alpha = p.alpha;
    r.tau_star = r.rho = r.M = r.W = r.eta = kNaN;
    r.E_sh = r.E_deg = r.E_sup = kNaN;
    try {
        p.validate();
        const ContinuumSums bath(p, opt.quad);
        r.E_sh = solve_sh(bath, p.delta).energy;
        r.E_deg = degenerate_ground(bath, p.delta).energy;
        const auto search = minimize_tau(bath, p.delta, p.s, opt.tau);
        r.E_sup = search.best.energy;
        const auto& st = search.has_nondegenerate ? search.nondegenerate : search.best;
        if (!search.has_nondegenerate) add_flag(r.flags, "no_nondegenerate");
        r.tau_star = st.tau;
        r.rho = st.rho;
        r.M = st.M;
        r.W = st.W;
        r.eta = st.eta;
        if (search.best.collapsed && search.best.rho == 0.0 && search.best.energy < st.energy)
            add_flag(r.flags, "degenerate_lower");
        if (search.multiple_minima) add_flag(r.flags, "multiple_minima");
    } catch (const std::exception& e) {
        add_flag(r.flags, std::string("error:") + e.what());
    }
    return r;
}

std::vector<ScanRecord> scan_alpha_serial(const BathParams& base, const std::vector<double>& alphas,
                                          const QcpOptions& opt)
{
    std::vector<ScanRecord> out;
    out.reserve(alphas.size());
    for (const double a : alphas) {
        BathParams q = base;
        q.alpha = a;
        out.push_back(scan_point(q, opt));
    }
    return out;
}

std::vector<ScanRecord> scan_alpha(const BathParams& base, const std::vector<double>& alphas, const QcpOptions& opt)
{
    std::vector<ScanRecord> out(alphas.size());
    const int n = static_cast<int>(alphas.size());
    const int threads = opt.threads > 0 ? opt.threads : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (int i = 0; i < n; ++i) {
        BathParams q = base;
        q.alpha = alphas[i];
        out[i] = scan_point(q, opt);
    }
    return out;
}

QcpResult locate_alpha_c(const BathParams& base, Method method, const QcpOptions& opt)
{
    base.validate();
    switch (method) {
    case Method::SH:
        return sh_alpha_c(base, opt.quad);
    case Method::Degenerate:
        return degenerate_alpha_c(base, opt.quad);
    case Method::Superposed:
        return superposed_alpha_c(base, opt);
    }
    throw DomainError("locate_alpha_c: unknown method");
}

std::vector<EnergyDifference> energy_difference_curve(const BathParams& base, const std::vector<double>& alphas,
                                                      const QcpOptions& opt)
{
    const auto recs = scan_alpha(base, alphas, opt);
    std::vector<EnergyDifference> out;
    out.reserve(recs.size());
    for (const auto& r : recs) {
        EnergyDifference d{r.alpha, r.E_sup - r.E_deg, {}};
        if (!std::isfinite(d.dE)) {
            d.dE = kNaN;
            add_flag(d.flags, r.flags.empty() ? "failed" : r.flags);
        }
        out.push_back(d);
    }
    return out;
}

bool reference_values(double s, ReferenceValues& out)
{
    if (s == 0.25) out = {0.0264, 0.0254, 0.0259, 0.0256, 0.08554, 0.02413, 0.02744};
    else if (s == 0.5) out = {0.1065, 0.0983, 0.0977, 0.0820, 0.1768, 0.08555, 0.1084};
    else if (s == 0.75) out = {0.3168, 0.2951, 0.2953, 0.3205, 0.3537, 0.2176, 0.3076};
    else if (s == 1.0) out = {1.0, 1.0, 1.0, 1.0, 1.0, 0.5121, 1.0};
    else return false;
    return true;
}

std::vector<Table1Row> table1_report(double delta, const std::vector<double>& s_list, const Table1Options& opt)
{
    std::vector<Table1Row> rows;
    for (const double s : s_list) {
        Table1Row row;
        row.s = s;
        BathParams p;
        p.s = s;
        p.delta = delta;
        BathParams psh = p;
        if (s == 1.0) psh.delta = opt.ohmic_sh_delta;
        auto cell = [&](auto&& fn, QcpResult& out, bool& ok, const char* tag) {
            try {
                out = fn();
                ok = std::isfinite(out.alpha_c);
            } catch (const std::exception& e) {
                add_flag(row.flags, std::string(tag) + ":" + e.what());
            }
        };
        cell([&] { return locate_alpha_c(psh, Method::SH, opt.qcp); }, row.sh, row.sh_ok, "sh");
        cell([&] { return locate_alpha_c(p, Method::Degenerate, opt.qcp); }, row.deg, row.deg_ok, "deg");
        cell([&] { return locate_alpha_c(p, Method::Superposed, opt.qcp); }, row.sup, row.sup_ok, "sup");
        rows.push_back(std::move(row));
    }
    return rows;
}

std::vector<SensitivityRow> delta_sensitivity(const std::vector<double>& s_list, const std::vector<double>& deltas,
                                              const QcpOptions& opt)
{
    QcpOptions o = opt;
    o.rho_criterion_sub_ohmic = false;
    std::vector<SensitivityRow> out;
    for (const double s : s_list) {
        for (const double d : deltas) {
            SensitivityRow r{s, d, kNaN, false};
            BathParams p;
            p.s = s;
            p.delta = d;
            try {
                r.alpha_c = locate_alpha_c(p, Method::Superposed, o).alpha_c;
                r.ok = std::isfinite(r.alpha_c);
            } catch (const std::exception&) {
            }
            out.push_back(r);
        }
    }
    return out;
}

}  // namespace sbqcp
