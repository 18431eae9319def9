#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sbqcp/bath.hpp"

namespace sbqcp {

struct SuperposedSolution {
    double tau{0.0};
    double rho{1.0};
    double delta_shift{0.0};
    double a{0.0};  // rho * delta_shift, the scale entering the kernels
    double eta{1.0};
    double M{0.0};
    double W{0.0};
    double Y{0.0};
    double E0{0.0};
    double U{0.0};
    double energy{0.0};
    double A{0.0};
    bool converged{false};
    bool collapsed{false};  // rho = 0 limit, energy = E0
    int iterations{0};
    std::string note;

    double u_plus() const;
    double u_minus() const;
    double v_plus() const { return u_minus(); }
    double v_minus() const { return u_plus(); }
};

// cosh(M) - 1 - M (sinh(M) - M), evaluated verbatim.
double hyperbolic_bracket(double M);

double compute_E0(const BathSums& bath, double delta, const SuperposedSolution& st);
double compute_U(const BathSums& bath, double delta, const SuperposedSolution& st);

struct DeltaValue {
    double value{0.0};
    bool non_positive{false};
};
DeltaValue compute_delta(const SuperposedSolution& st);

double compute_rho(const BathSums& bath, const SuperposedSolution& st);

// Convenience overloads on the continuum bath.
double compute_E0(const BathParams& p, const SuperposedSolution& st, const QuadratureConfig& cfg = {});
double compute_U(const BathParams& p, const SuperposedSolution& st, const QuadratureConfig& cfg = {});
double compute_rho(const BathParams& p, const SuperposedSolution& st, const QuadratureConfig& cfg = {});

// One evaluation of the self-consistency map at the iterate (W, a). The
// returned state carries every derived field; next_W/next_a are the images.
struct SuperposedMap {
    SuperposedSolution state;
    bool valid{false};
    double log_next_W{0.0};
    double log_next_a{0.0};
};
SuperposedMap superposed_map(const BathSums& bath, double delta, double tau, double W, double a);

struct InnerOptions {
    int max_iter{100000};
    int newton_iter{60};
    double tol{1e-11};
    double min_log_a{-645.0};  // below this the iterate is treated as collapsed
};

// Self-consistent state at fixed tau. Newton on (ln W, ln a) from the warm
// start (or the SH seed W = a = eta0 Delta), then damped fixed-point iteration.
SuperposedSolution solve_inner(const BathSums& bath, double delta, double tau,
                               const std::optional<std::pair<double, double>>& warm = std::nullopt,
                               const InnerOptions& opt = {});
SuperposedSolution solve_inner(const BathParams& p, double tau,
                               const std::optional<std::pair<double, double>>& warm = std::nullopt,
                               const QuadratureConfig& cfg = {});

// Newton only; returns nullopt when the start does not converge to a valid state.
std::optional<SuperposedSolution> newton_inner(const BathSums& bath, double delta, double tau, double log_W,
                                               double log_a, const InnerOptions& opt = {});

// rho = 0 limit at fixed tau: phi_k = tau, M = 2 alpha tau W Jd(W).
std::optional<SuperposedSolution> collapsed_inner(const BathSums& bath, double delta, double tau);

// Every distinct self-consistent state reachable from the seed lattice and the extra seeds.
std::vector<SuperposedSolution> find_branches(const BathSums& bath, double delta, double tau,
                                              const std::vector<std::pair<double, double>>& extra_seeds,
                                              bool use_lattice, const InnerOptions& opt = {});

struct TauOptions {
    double tau_min{5e-3};
    double tau_cap{3.0};     // upper end of the tau window when s != 1
    double tau_step{0.1};    // coarse grid spacing
    int lattice_every{5};    // full seed lattice on every n-th grid point
    double tau_tol{1e-5};
};

double tau_max_for(double s, double alpha, const TauOptions& opt);

struct TauSearch {
    SuperposedSolution best;            // lowest energy among all candidates
    SuperposedSolution nondegenerate;   // lowest energy among states with rho > 0
    bool has_nondegenerate{false};
    bool multiple_minima{false};
    std::vector<std::pair<double, double>> minima;  // (tau, energy) local minima of the coarse curve
};

TauSearch minimize_tau(const BathSums& bath, double delta, double s, const TauOptions& opt = {});
TauSearch minimize_tau(const BathParams& p, const TauOptions& opt = {}, const QuadratureConfig& cfg = {});

// Asymptotic Ohmic overlap; DomainError when alpha tau^2 >= 1.
double rho_asymptotic_s1(const BathParams& p, const SuperposedSolution& st);

struct SigmaZ {
    double g_avg{0.0};
    double psi_plus_avg{0.0};
};
SigmaZ sigma_z_moments(const SuperposedSolution& st);

// Energy on a discrete bath as an explicit function of per-mode phi_k with
// W and eta held at the state's values.
double discrete_energy_of_phi(const DiscreteBath& bath, double delta, double W, double eta,
                              const std::vector<double>& phi);

// Stationary profile on a discrete bath: phi_k = tau' w/(w + rho delta') with
// (tau', delta') from the exact stationarity condition, re-converged at fixed W, eta.
struct DiscreteProfile {
    std::vector<double> phi;
    double tau{0.0};
    double rho{0.0};
    double delta_shift{0.0};
    double energy{0.0};
    bool converged{false};
};
DiscreteProfile stationary_profile(const DiscreteBath& bath, double delta, const SuperposedSolution& st);

// Centered finite-difference gradient dE/dphi_k of discrete_energy_of_phi.
std::vector<double> stationarity_residual(const DiscreteBath& bath, double delta, double W, double eta,
                                          const std::vector<double>& phi, double h = 1e-5);

// The profile tau w/(w + rho delta) of a state, sampled on the modes.
std::vector<double> profile_of(const DiscreteBath& bath, const SuperposedSolution& st);

}  // namespace sbqcp
