#include "sbqcp/oracle_ed.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "sbqcp/ansatz_degenerate.hpp"
#include "sbqcp/ansatz_sh.hpp"
#include "sbqcp/ansatz_superposed.hpp"
#include "sbqcp/errors.hpp"

namespace sbqcp {

std::size_t EdInstance::dim() const
{
    const std::size_t base = static_cast<std::size_t>(std::max(n_max, 0)) + 1;
    std::size_t d = 2;
    for (std::size_t k = 0; k < bath.size(); ++k) {
        if (d > std::numeric_limits<std::size_t>::max() / base) return std::numeric_limits<std::size_t>::max();
        d *= base;
    }
    return d;
}

void EdInstance::validate() const
{
    if (n_max < 0) throw DomainError("n_max must be >= 0");
    if (bath.frequencies.size() != bath.couplings.size()) throw DomainError("bath: frequency/coupling size mismatch");
    for (const double w : bath.frequencies)
        if (!(w > 0.0)) throw DomainError("bath: frequencies must be > 0");
    if (!(delta >= 0.0)) throw DomainError("delta must be >= 0");
    if (dim() > cap) throw CapExceeded("ED dimension " + std::to_string(dim()) + " exceeds cap " + std::to_string(cap));
}

SectorOperator::SectorOperator(const EdInstance& inst, int parity) : n_max_(inst.n_max), parity_(parity)
{
    inst.validate();
    if (parity != 1 && parity != -1) throw DomainError("parity must be +1 or -1");
    const std::size_t modes = inst.bath.size();
    const std::size_t base = static_cast<std::size_t>(n_max_) + 1;
    stride_.resize(modes);
    std::size_t n = 1;
    for (std::size_t k = 0; k < modes; ++k) {
        stride_[k] = n;
        n *= base;
    }
    half_g_.resize(modes);
    for (std::size_t k = 0; k < modes; ++k) half_g_[k] = 0.5 * inst.bath.couplings[k];

    diag_.assign(n, 0.0);
    for (std::size_t idx = 0; idx < n; ++idx) {
        double e = 0.0;
        int total = 0;
        for (std::size_t k = 0; k < modes; ++k) {
            const int nk = static_cast<int>((idx / stride_[k]) % base);
            e += inst.bath.frequencies[k] * nk;
            total += nk;
        }
        const double sign = (total % 2 == 0) ? 1.0 : -1.0;
        diag_[idx] = e - 0.5 * inst.delta * parity_ * sign;
    }
}

int SectorOperator::occupation(std::size_t idx) const
{
    const std::size_t base = static_cast<std::size_t>(n_max_) + 1;
    int total = 0;
    for (const std::size_t st : stride_) total += static_cast<int>((idx / st) % base);
    return total;
}

void SectorOperator::apply_row(std::size_t idx, const double* x, double* y) const
{
    const std::size_t base = static_cast<std::size_t>(n_max_) + 1;
    double acc = diag_[idx] * x[idx];
    for (std::size_t k = 0; k < stride_.size(); ++k) {
        const std::size_t st = stride_[k];
        const int nk = static_cast<int>((idx / st) % base);
        if (nk > 0) acc += half_g_[k] * std::sqrt(static_cast<double>(nk)) * x[idx - st];
        if (nk < n_max_) acc += half_g_[k] * std::sqrt(static_cast<double>(nk + 1)) * x[idx + st];
    }
    y[idx] = acc;
}

void SectorOperator::apply(const double* x, double* y) const
{
    const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(diag_.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) apply_row(static_cast<std::size_t>(i), x, y);
}

void SectorOperator::apply_serial(const double* x, double* y) const
{
    for (std::size_t i = 0; i < diag_.size(); ++i) apply_row(i, x, y);
}

double SectorOperator::norm_bound() const
{
    double off = 0.0;
    for (const double h : half_g_) off += 2.0 * std::abs(h) * std::sqrt(static_cast<double>(n_max_));
    double d = 0.0;
    for (const double v : diag_) d = std::max(d, std::abs(v));
    return d + off;
}

Eigen::SparseMatrix<double> build_hamiltonian(const EdInstance& inst, int parity)
{
    inst.validate();
    std::vector<int> sectors = parity == 0 ? std::vector<int>{1, -1} : std::vector<int>{parity};
    const std::size_t n = inst.sector_dim();
    Eigen::SparseMatrix<double> H(static_cast<Eigen::Index>(n * sectors.size()),
                                  static_cast<Eigen::Index>(n * sectors.size()));
    std::vector<Eigen::Triplet<double>> trip;
    std::vector<double> e(n, 0.0), col(n, 0.0);
    for (std::size_t b = 0; b < sectors.size(); ++b) {
        const SectorOperator op(inst, sectors[b]);
        const std::size_t off = b * n;
        for (std::size_t j = 0; j < n; ++j) {
            e[j] = 1.0;
            op.apply_serial(e.data(), col.data());
            e[j] = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (col[i] != 0.0)
                    trip.emplace_back(static_cast<Eigen::Index>(off + i), static_cast<Eigen::Index>(off + j), col[i]);
        }
    }
    H.setFromTriplets(trip.begin(), trip.end());
    return H;
}

Eigen::SparseMatrix<double> build_full_hamiltonian(const EdInstance& inst)
{
    inst.validate();
    const std::size_t n = inst.sector_dim();
    const std::size_t modes = inst.bath.size();
    const std::size_t base = static_cast<std::size_t>(inst.n_max) + 1;
    std::vector<std::size_t> stride(modes);
    std::size_t acc = 1;
    for (std::size_t k = 0; k < modes; ++k) {
        stride[k] = acc;
        acc *= base;
    }
    std::vector<Eigen::Triplet<double>> trip;
    for (int sigma = 0; sigma < 2; ++sigma) {
        const double sz = sigma == 0 ? 1.0 : -1.0;
        const std::size_t off = static_cast<std::size_t>(sigma) * n;
        for (std::size_t idx = 0; idx < n; ++idx) {
            double e = 0.0;
            for (std::size_t k = 0; k < modes; ++k) {
                const int nk = static_cast<int>((idx / stride[k]) % base);
                e += inst.bath.frequencies[k] * nk;
                if (nk < inst.n_max) {
                    const double v = 0.5 * inst.bath.couplings[k] * sz * std::sqrt(static_cast<double>(nk + 1));
                    trip.emplace_back(off + idx + stride[k], off + idx, v);
                    trip.emplace_back(off + idx, off + idx + stride[k], v);
                }
            }
            trip.emplace_back(off + idx, off + idx, e);
            trip.emplace_back(off + idx, (n - off) + idx, -0.5 * inst.delta);
        }
    }
    Eigen::SparseMatrix<double> H(static_cast<Eigen::Index>(2 * n), static_cast<Eigen::Index>(2 * n));
    H.setFromTriplets(trip.begin(), trip.end());
    return H;
}

EigenPair lanczos_ground(const SectorOperator& op, const LanczosOptions& opt)
{
    const std::size_t n = op.size();
    using Vec = Eigen::VectorXd;
    auto apply = [&](const Vec& x, Vec& y) {
        if (opt.parallel)
            op.apply(x.data(), y.data());
        else
            op.apply_serial(x.data(), y.data());
    };
    const double scale = std::max(1.0, op.norm_bound());
    const int m_max = static_cast<int>(std::min<std::size_t>(static_cast<std::size_t>(opt.krylov), n));

    Vec v = Vec::Ones(static_cast<Eigen::Index>(n)).normalized();
    Vec w(static_cast<Eigen::Index>(n)), hv(static_cast<Eigen::Index>(n));
    std::vector<Vec> basis;
    EigenPair out;
    int matvecs = 0;
    for (int restart = 0; restart < opt.max_restarts; ++restart) {
        basis.assign(1, v);
        std::vector<double> a, b;
        for (int j = 0; j < m_max; ++j) {
            apply(basis[j], w);
            ++matvecs;
            const double aj = basis[j].dot(w);
            a.push_back(aj);
            for (int pass = 0; pass < 2; ++pass)
                for (const auto& q : basis) w -= q.dot(w) * q;
            const double bj = w.norm();
            if (j + 1 == m_max || bj < 1e-14 * scale) break;
            b.push_back(bj);
            basis.push_back(w / bj);
        }
        const int m = static_cast<int>(a.size());
        Eigen::MatrixXd T = Eigen::MatrixXd::Zero(m, m);
        for (int i = 0; i < m; ++i) {
            T(i, i) = a[i];
            if (i + 1 < m) T(i, i + 1) = T(i + 1, i) = b[i];
        }
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T);
        const Eigen::VectorXd s = es.eigenvectors().col(0);
        Vec ritz = Vec::Zero(static_cast<Eigen::Index>(n));
        for (int i = 0; i < m; ++i) ritz += s[i] * basis[i];
        ritz.normalize();
        apply(ritz, hv);
        ++matvecs;
        const double theta = ritz.dot(hv);
        const double res = (hv - theta * ritz).norm();
        out.value = theta;
        out.residual = res;
        out.iterations = matvecs;
        if (res < opt.tol * scale) {
            out.vector.assign(ritz.data(), ritz.data() + n);
            return out;
        }
        v = ritz;
    }
    throw NonConvergedEigensolver("Lanczos: residual " + std::to_string(out.residual) + " after " +
                                  std::to_string(matvecs) + " matvecs");
}

EdResult ed_ground_state(const EdInstance& inst, const LanczosOptions& opt)
{
    inst.validate();
    const SectorOperator even(inst, 1), odd(inst, -1);
    const auto pe = lanczos_ground(even, opt);
    const auto po = lanczos_ground(odd, opt);
    const bool take_even = pe.value <= po.value;
    const auto& g = take_even ? pe : po;
    const SectorOperator& op = take_even ? even : odd;

    EdResult r;
    r.parity = take_even ? 1 : -1;
    r.energy = g.value;
    r.residual = g.residual;
    r.iterations = pe.iterations + po.iterations;
    r.other_sector_energy = take_even ? po.value : pe.value;

    // Product-basis amplitudes: up = c/sqrt2, down = p (-1)^N c/sqrt2.
    double sz = 0.0, sx = 0.0;
    const double inv = 1.0 / std::sqrt(2.0);
    for (std::size_t i = 0; i < g.vector.size(); ++i) {
        const double sign = op.occupation(i) % 2 == 0 ? 1.0 : -1.0;
        const double up = g.vector[i] * inv;
        const double dn = r.parity * sign * g.vector[i] * inv;
        sz += up * up - dn * dn;
        sx += 2.0 * up * dn;
    }
    r.sigma_z_avg = sz;
    r.sigma_x_avg = sx;
    return r;
}

std::pair<double, double> dense_sector_energies(const EdInstance& inst)
{
    auto lowest = [&](int p) {
        const Eigen::MatrixXd H = Eigen::MatrixXd(build_hamiltonian(inst, p));
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H, Eigen::EigenvaluesOnly);
        return es.eigenvalues()[0];
    };
    return {lowest(1), lowest(-1)};
}

double variational_energy_discrete(const EdInstance& inst, Method ansatz, const VariationalInput& in)
{
    const DiscreteSums sums(inst.bath, in.alpha);
    switch (ansatz) {
    case Method::SH:
        return solve_sh(sums, inst.delta).energy;
    case Method::Degenerate:
        return degenerate_ground(sums, inst.delta).energy;
    case Method::Superposed:
        return minimize_tau(sums, inst.delta, in.s).best.energy;
    }
    throw DomainError("variational_energy_discrete: unknown ansatz");
}

std::vector<UpperBoundRow> upper_bound_report(const EdInstance& inst, const VariationalInput& in,
                                              const LanczosOptions& opt)
{
    const auto ed = ed_ground_state(inst, opt);
    std::vector<UpperBoundRow> rows;
    for (const Method m : {Method::SH, Method::Degenerate, Method::Superposed}) {
        UpperBoundRow row;
        row.ansatz = m;
        row.E_ed = ed.energy;
        try {
            row.E_var = variational_energy_discrete(inst, m, in);
            row.gap = row.E_var - row.E_ed;
            row.ok = true;
        } catch (const std::exception& e) {
            row.E_var = row.gap = std::numeric_limits<double>::quiet_NaN();
            row.error = e.what();
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace sbqcp
