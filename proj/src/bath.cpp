#include "sbqcp/bath.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "sbqcp/errors.hpp"
#include "sbqcp/gauss_legendre.hpp"

namespace sbqcp {

namespace {

constexpr double kFloorRatio = 1e-10;
constexpr double kFloorMin = 1e-300;
constexpr double kDirectFloor = 1e-140;  // below this 1/(w+W)^2 can overflow
constexpr double kMaxPanelWidth = 1.5;

// ln(w + c) for w = e^t without forming tiny sums.
inline double log_sum(double t, double lc)
{
    return t >= lc ? t + std::log1p(std::exp(lc - t)) : lc + std::log1p(std::exp(t - lc));
}

std::vector<double> panel_edges(double t0, std::vector<double> breaks, int min_panels, double hmax)
{
    breaks.push_back(t0);
    breaks.push_back(0.0);
    std::sort(breaks.begin(), breaks.end());
    breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());

    const double total = -t0;
    std::vector<double> edges{breaks.front()};
    for (std::size_t i = 1; i < breaks.size(); ++i) {
        const double lo = breaks[i - 1];
        const double hi = breaks[i];
        const double len = hi - lo;
        if (len <= 0.0) continue;
        const int by_width = static_cast<int>(std::ceil(len / hmax));
        const int by_share = static_cast<int>(std::ceil(min_panels * len / total));
        const int n = std::max({1, by_width, by_share});
        for (int k = 1; k <= n; ++k) edges.push_back(k == n ? hi : lo + len * k / n);
    }
    return edges;
}

}  // namespace

const char* to_string(MomentKind kind)
{
    switch (kind) {
    case MomentKind::I1: return "I1";
    case MomentKind::I2: return "I2";
    case MomentKind::I3: return "I3";
    case MomentKind::I4: return "I4";
    case MomentKind::Jd: return "Jd";
    case MomentKind::K: return "K";
    case MomentKind::D: return "D";
    }
    return "?";
}

void BathParams::validate() const
{
    if (!(s > 0.0) || !std::isfinite(s)) throw DomainError("s must be > 0");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw DomainError("alpha must be >= 0");
    if (!(delta >= 0.0) || delta > 1.0) throw DomainError("delta must lie in [0, 1]");
    if (omega_c != 1.0) throw DomainError("omega_c must equal 1");
}

double spectral_density(const BathParams& p, double omega)
{
    if (!(omega > 0.0)) throw DomainError("spectral_density: omega must be > 0");
    if (omega > p.omega_c) return 0.0;
    return 2.0 * p.alpha * std::pow(omega, p.s) * std::pow(p.omega_c, 1.0 - p.s);
}

namespace detail {

RawIntegrals log_grid_integrals(double s, double W, double a, unsigned mask,
                                const QuadratureConfig& cfg, double refine)
{
    const bool want_a = (mask & (kI2 | kI3 | kI4)) != 0;
    if (!(W > 0.0)) throw DomainError("kernel scale W must be > 0");
    if (want_a && !(a > 0.0)) throw DomainError("kernel scale a must be > 0");
    if (cfg.panels < 1 || cfg.nodes_per_panel < 1) throw DomainError("quadrature: panels and nodes must be >= 1");

    double smallest = std::min(W, 1.0);
    if (want_a) smallest = std::min(smallest, a);
    double floor = kFloorRatio * smallest;
    if (cfg.omega_floor > 0.0) floor = std::min(floor, cfg.omega_floor);
    floor = std::max(floor, kFloorMin);

    const double t0 = std::log(floor);
    const double lW = std::log(W);
    const double la = want_a ? std::log(a) : 0.0;
    std::vector<double> breaks;
    if (lW > t0 && lW < 0.0) breaks.push_back(lW);
    if (want_a && la > t0 && la < 0.0) breaks.push_back(la);

    const int min_panels = static_cast<int>(std::lround(cfg.panels * refine));
    const int nodes = static_cast<int>(std::lround(cfg.nodes_per_panel * refine));
    const auto edges = panel_edges(t0, breaks, min_panels, kMaxPanelWidth / refine);
    const auto& rule = gauss_legendre_cached(nodes);

    RawIntegrals r;
    const bool direct = floor >= kDirectFloor;
    for (std::size_t p = 1; p < edges.size(); ++p) {
        const double half = 0.5 * (edges[p] - edges[p - 1]);
        const double mid = 0.5 * (edges[p] + edges[p - 1]);
        for (int j = 0; j < nodes; ++j) {
            const double t = mid + half * rule.nodes[j];
            const double w = std::exp(t);
            const double wt = half * rule.weights[j] * w;
            if (direct) {
                const double ws = std::exp(s * t);
                const double iw = 1.0 / (w + W);
                const double f1 = ws * iw * iw;
                if (mask & kI1) r.i1 += wt * f1;
                if (mask & kJd) r.jd += wt * f1 / w;
                if (mask & kK) r.kbar += wt * 0.5 * f1 * (w + 2.0 * W);
                if (mask & kI1p) r.i1p += wt * f1 * iw;
                if (mask & kD) r.d += wt * f1 / (w * w);
                if (want_a) {
                    const double ia = 1.0 / (w + a);
                    if (mask & kI2) r.i2 += wt * f1 * ia;
                    if (mask & kI3) r.i3 += wt * f1 * w * ia * ia;
                    if (mask & kI4) r.i4 += wt * f1 * ia * ia;
                }
            } else {
                const double ht = half * rule.weights[j];
                const double lw = log_sum(t, lW);
                const double base = (s + 1.0) * t - 2.0 * lw;
                if (mask & kI1) r.i1 += ht * std::exp(base);
                if (mask & kJd) r.jd += ht * std::exp(base - t);
                if (mask & kK) r.kbar += ht * 0.5 * std::exp(base + log_sum(t, std::log(2.0) + lW));
                if (mask & kI1p) r.i1p += ht * std::exp(base - lw);
                if (mask & kD) r.d += ht * std::exp(base - 2.0 * t);
                if (want_a) {
                    const double lsa = log_sum(t, la);
                    if (mask & kI2) r.i2 += ht * std::exp(base - lsa);
                    if (mask & kI3) r.i3 += ht * std::exp(base + t - 2.0 * lsa);
                    if (mask & kI4) r.i4 += ht * std::exp(base - 2.0 * lsa);
                }
            }
        }
    }

    // Leading small-w behaviour on [0, floor].
    const double lf = t0;
    auto tail = [&](double p, double lcoef) { return std::exp((p + 1.0) * lf + lcoef) / (p + 1.0); };
    if (mask & kI1) r.i1 += tail(s, -2.0 * lW);
    if (mask & kJd) r.jd += tail(s - 1.0, -2.0 * lW);
    if (mask & kK) r.kbar += tail(s, -lW);
    if (mask & kI1p) r.i1p += tail(s, -3.0 * lW);
    if ((mask & kD) && s > 1.0) r.d += tail(s - 2.0, -2.0 * lW);
    if (want_a) {
        if (mask & kI2) r.i2 += tail(s, -2.0 * lW - la);
        if (mask & kI3) r.i3 += tail(s + 1.0, -2.0 * lW - 2.0 * la);
        if (mask & kI4) r.i4 += tail(s, -2.0 * lW - 2.0 * la);
    }
    return r;
}

}  // namespace detail

namespace {

double pick(const detail::RawIntegrals& r, MomentKind kind)
{
    switch (kind) {
    case MomentKind::I1: return r.i1;
    case MomentKind::I2: return r.i2;
    case MomentKind::I3: return r.i3;
    case MomentKind::I4: return r.i4;
    case MomentKind::Jd: return r.jd;
    case MomentKind::K: return r.kbar;
    case MomentKind::D: return r.d;
    }
    return 0.0;
}

unsigned mask_of(MomentKind kind)
{
    switch (kind) {
    case MomentKind::I1: return kI1;
    case MomentKind::I2: return kI2;
    case MomentKind::I3: return kI3;
    case MomentKind::I4: return kI4;
    case MomentKind::Jd: return kJd;
    case MomentKind::K: return kK;
    case MomentKind::D: return detail::kD;
    }
    return 0u;
}

}  // namespace

MomentValue bath_moment(const BathParams& p, MomentKind kind, double W, double a,
                        const QuadratureConfig& cfg)
{
    p.validate();
    if (!(W > 0.0)) throw DomainError("bath_moment: W must be > 0");
    if (a < 0.0) throw DomainError("bath_moment: a must be >= 0");

    // At a = 0 the a-dependent kernels collapse onto the single-scale ones.
    if (a == 0.0) {
        if (kind == MomentKind::I2 || kind == MomentKind::I3) kind = MomentKind::Jd;
        if (kind == MomentKind::I4) kind = MomentKind::D;
    }
    if (kind == MomentKind::D && p.s <= 1.0) return MomentValue::infinite();

    const unsigned mask = mask_of(kind);
    const double coarse = pick(detail::log_grid_integrals(p.s, W, a, mask, cfg, 1.0), kind);
    const double fine = pick(detail::log_grid_integrals(p.s, W, a, mask, cfg, 2.0), kind);
    if (!std::isfinite(fine) || std::abs(coarse - fine) > cfg.rel_tol * std::abs(fine)) {
        throw NonConvergedQuadrature(std::string("bath_moment: ") + to_string(kind) +
                                     " refinement disagrees beyond rel_tol");
    }
    return MomentValue::finite(kind == MomentKind::K ? p.alpha * fine : fine);
}

DiscreteBath discretize_bath(const BathParams& p, Scheme scheme, int n_modes, double lambda)
{
    p.validate();
    if (n_modes < 1) throw DomainError("discretize_bath: n_modes must be >= 1");
    if (scheme == Scheme::logarithmic && !(lambda > 1.0))
        throw DomainError("discretize_bath: lambda must be > 1");

    DiscreteBath bath;
    bath.scheme = scheme;
    bath.lambda = lambda;
    const double s = p.s;
    for (int i = 0; i < n_modes; ++i) {
        double lo = 0.0;
        double hi = 0.0;
        if (scheme == Scheme::linear) {
            lo = static_cast<double>(i) / n_modes;
            hi = static_cast<double>(i + 1) / n_modes;
        } else {
            hi = std::pow(lambda, -i);
            lo = (i == n_modes - 1) ? 0.0 : std::pow(lambda, -(i + 1));
        }
        const double m1 = std::pow(hi, s + 1.0) - std::pow(lo, s + 1.0);
        const double m2 = std::pow(hi, s + 2.0) - std::pow(lo, s + 2.0);
        bath.frequencies.push_back((s + 1.0) / (s + 2.0) * m2 / m1);
        bath.couplings.push_back(std::sqrt(2.0 * p.alpha * m1 / (s + 1.0)));
    }
    return bath;
}

ContinuumSums::ContinuumSums(const BathParams& p, const QuadratureConfig& cfg)
    : s_(p.s), alpha_(p.alpha), cfg_(cfg)
{
    p.validate();
}

KernelSums ContinuumSums::eval(double W, double a, unsigned mask) const
{
    KernelSums out;
    if (alpha_ == 0.0) return out;

    unsigned grid_mask = mask;
    if (a == 0.0 && (mask & (kI2 | kI3 | kI4))) {
        grid_mask = (mask & ~(kI2 | kI3 | kI4)) | kJd;
        if ((mask & kI4) && s_ > 1.0) grid_mask |= detail::kD;
    }
    const auto r = detail::log_grid_integrals(s_, W, a, grid_mask, cfg_, 1.0);
    out.i1 = alpha_ * r.i1;
    out.jd = alpha_ * r.jd;
    out.k = alpha_ * r.kbar;
    out.i1p = alpha_ * r.i1p;
    if (a == 0.0) {
        out.i2 = out.i3 = out.jd;
        out.i4 = s_ > 1.0 ? alpha_ * r.d : std::numeric_limits<double>::infinity();
    } else {
        out.i2 = alpha_ * r.i2;
        out.i3 = alpha_ * r.i3;
        out.i4 = alpha_ * r.i4;
    }
    return out;
}

double ContinuumSums::k_at_zero() const { return alpha_ / (2.0 * s_); }

DiscreteSums::DiscreteSums(const DiscreteBath& bath, double alpha_label)
    : bath_(bath), alpha_(alpha_label)
{
    if (bath_.frequencies.size() != bath_.couplings.size())
        throw DomainError("DiscreteSums: frequency and coupling counts differ");
}

KernelSums DiscreteSums::eval(double W, double a, unsigned mask) const
{
    if (!(W > 0.0)) throw DomainError("kernel scale W must be > 0");
    KernelSums out;
    for (std::size_t i = 0; i < bath_.size(); ++i) {
        const double w = bath_.frequencies[i];
        const double h = 0.5 * bath_.couplings[i] * bath_.couplings[i];
        const double iw = 1.0 / (w + W);
        const double ia = 1.0 / (w + a);
        const double f1 = h * iw * iw;
        if (mask & kI1) out.i1 += f1;
        if (mask & kI2) out.i2 += f1 * ia;
        if (mask & kI3) out.i3 += f1 * w * ia * ia;
        if (mask & kI4) out.i4 += f1 * ia * ia;
        if (mask & kJd) out.jd += f1 / w;
        if (mask & kK) out.k += 0.5 * f1 * (w + 2.0 * W);
        if (mask & kI1p) out.i1p += f1 * iw;
    }
    return out;
}

double DiscreteSums::k_at_zero() const
{
    double k = 0.0;
    for (std::size_t i = 0; i < bath_.size(); ++i)
        k += 0.25 * bath_.couplings[i] * bath_.couplings[i] / bath_.frequencies[i];
    return k;
}

}  // namespace sbqcp
