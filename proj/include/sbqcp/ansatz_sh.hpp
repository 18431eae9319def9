#pragma once

#include "sbqcp/bath.hpp"
#include "sbqcp/qcp_result.hpp"

namespace sbqcp {

struct ShSolution {
    double eta0{1.0};
    double energy{0.0};
    int iterations{0};
    bool converged{false};
    double slope{0.0};  // derivative of the log-space map at the fixed point
};

struct ShOptions {
    // Collapse threshold for the trivial branch. The Ohmic scaling limit
    // produces eta0 = (e Delta)^(alpha/(1-alpha)) far below 1e-12 near alpha = 1.
    double eta_floor{1e-280};
    int max_iter{100000};
    double tol{1e-13};
};

ShSolution solve_sh(const BathParams& p, const QuadratureConfig& cfg = {}, const ShOptions& opt = {});
ShSolution solve_sh(const BathSums& bath, double delta, const ShOptions& opt = {});

// -eta0 Delta / 2 - K(eta0 Delta); K(0) = alpha / (2 s).
double sh_energy(const BathParams& p, double eta0, const QuadratureConfig& cfg = {});
double sh_energy(const BathSums& bath, double delta, double eta0);

// Expectation value of H in the SH state with displacements g/(2(w + W)).
// Stationary in W exactly at W = eta0 Delta.
double sh_functional(const BathSums& bath, double delta, double W);

QcpResult sh_alpha_c(const BathParams& p, const QuadratureConfig& cfg = {}, const ShOptions& opt = {});

}  // namespace sbqcp
