#pragma once

#include "sbqcp/ansatz_sh.hpp"
#include "sbqcp/bath.hpp"
#include "sbqcp/qcp_result.hpp"

namespace sbqcp {

enum class Branch { symmetric, broken };

const char* to_string(Branch b);

struct DegenerateSolution {
    double eta{1.0};
    double M{0.0};
    double W{0.0};
    double energy{0.0};
    Branch branch{Branch::symmetric};

    // Spin amplitudes of |Psi+>: u+ = v- = sqrt((1+M)/2), u- = v+ = sqrt((1-M)/2).
    double u_plus() const;
    double u_minus() const;
};

// Throws NoSolution when the broken branch is absent.
DegenerateSolution solve_degenerate(const BathParams& p, Branch branch, const QuadratureConfig& cfg = {});
DegenerateSolution solve_degenerate(const BathSums& bath, double delta, Branch branch,
                                    const ShOptions& opt = {});

// Broken branch when it exists with lower energy, symmetric otherwise.
DegenerateSolution degenerate_ground(const BathSums& bath, double delta);

double degenerate_energy(const DegenerateSolution& sol, const BathParams& p, const QuadratureConfig& cfg = {});
double degenerate_energy(const DegenerateSolution& sol, const BathSums& bath);

struct DegenerateResiduals {
    double eta{0.0};  // eta - exp(-alpha I1(W))
    double m{0.0};    // 2 alpha W Jd(W) - 1 (broken branch only)
    double w{0.0};    // W - eta Delta / sqrt(1 - M^2)
};

DegenerateResiduals degenerate_residuals(const DegenerateSolution& sol, const BathSums& bath, double delta);

struct OverlapValue {
    bool zero_divergent{false};
    double rho{1.0};
};

// <Psi-|Psi+> for constant phi_k = M: exp(-alpha M^2 W^2 D(W)).
OverlapValue constant_phi_overlap(const DegenerateSolution& sol, const BathParams& p,
                                  const QuadratureConfig& cfg = {});

QcpResult degenerate_alpha_c(const BathParams& p, const QuadratureConfig& cfg = {});

}  // namespace sbqcp
