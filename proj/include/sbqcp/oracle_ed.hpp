#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstddef>
#include <string>
#include <vector>

#include "sbqcp/bath.hpp"
#include "sbqcp/qcp_result.hpp"

namespace sbqcp {

struct EdInstance {
    DiscreteBath bath;
    double delta{0.1};
    int n_max{10};
    std::size_t cap{2000000};

    // 2 (n_max + 1)^modes; saturates at SIZE_MAX.
    std::size_t dim() const;
    std::size_t sector_dim() const { return dim() / 2; }
    // Throws DomainError on bad fields and CapExceeded when dim() > cap.
    void validate() const;
};

// Parity P = sigma_x (-1)^N commutes with H. In the sector P = p the basis
// (|up, n> + p (-1)^N |down, n>)/sqrt(2) gives
//   H_p = sum w n - (Delta/2) p (-1)^N + (1/2) sum g (b + b^dag).
class SectorOperator {
public:
    SectorOperator(const EdInstance& inst, int parity);

    std::size_t size() const { return diag_.size(); }
    int parity() const { return parity_; }

    void apply(const double* x, double* y) const;         // OpenMP
    void apply_serial(const double* x, double* y) const;  // reference
    double norm_bound() const;                            // Gershgorin bound on ||H_p||

    const std::vector<double>& diagonal() const { return diag_; }
    // Total boson number of basis state idx.
    int occupation(std::size_t idx) const;

private:
    std::vector<double> diag_;
    std::vector<std::size_t> stride_;
    std::vector<double> half_g_;
    int n_max_;
    int parity_;
    void apply_row(std::size_t idx, const double* x, double* y) const;
};

// Explicit sparse sector matrix; both sectors stacked block-diagonally when parity == 0.
Eigen::SparseMatrix<double> build_hamiltonian(const EdInstance& inst, int parity = 0);

// Full product-basis Hamiltonian |sigma_z> (x) |n>, no symmetry reduction.
Eigen::SparseMatrix<double> build_full_hamiltonian(const EdInstance& inst);

struct EdResult {
    double energy{0.0};
    double sigma_z_avg{0.0};
    double sigma_x_avg{0.0};
    int parity{1};
    double residual{0.0};
    int iterations{0};
    double other_sector_energy{0.0};
};

struct LanczosOptions {
    int krylov{80};
    int max_restarts{400};
    double tol{1e-10};
    bool parallel{true};
};

struct EigenPair {
    double value{0.0};
    std::vector<double> vector;
    double residual{0.0};
    int iterations{0};
};

// Lowest eigenpair of a sector, restarted Lanczos with full reorthogonalization,
// fixed all-ones start vector.
EigenPair lanczos_ground(const SectorOperator& op, const LanczosOptions& opt = {});

// Both sectors; the lower one is reported. sigma_z and sigma_x are measured
// on the product-basis vector reconstructed from the sector vector.
EdResult ed_ground_state(const EdInstance& inst, const LanczosOptions& opt = {});

// Lowest eigenvalues of each sector by dense diagonalization (small instances only).
std::pair<double, double> dense_sector_energies(const EdInstance& inst);

struct VariationalInput {
    double s{1.0};
    double alpha{0.0};  // label for the ansatz solvers (tau window, alpha = 0 shortcut)
};

double variational_energy_discrete(const EdInstance& inst, Method ansatz, const VariationalInput& in);

struct UpperBoundRow {
    Method ansatz{Method::SH};
    double E_var{0.0};
    double E_ed{0.0};
    double gap{0.0};
    bool ok{false};
    std::string error;
};

std::vector<UpperBoundRow> upper_bound_report(const EdInstance& inst, const VariationalInput& in,
                                              const LanczosOptions& opt = {});

}  // namespace sbqcp
