#pragma once

#include <string>
#include <vector>

#include "sbqcp/ansatz_superposed.hpp"
#include "sbqcp/bath.hpp"
#include "sbqcp/qcp_result.hpp"

namespace sbqcp {

struct QcpOptions {
    QuadratureConfig quad{};
    TauOptions tau{};
    double eps_rho{1e-8};
    double bracket_width{5e-6};
    // Also bisect the rho-collapse criterion for s < 1 (reported as threshold/extrapolated).
    bool rho_criterion_sub_ohmic{true};
    int threads{0};  // 0: OpenMP default
};

struct ScanRecord {
    double alpha{0.0};
    double tau_star{0.0};
    double rho{0.0};
    double M{0.0};
    double W{0.0};
    double eta{0.0};
    double E_sh{0.0};
    double E_deg{0.0};
    double E_sup{0.0};
    std::string flags;  // '|'-separated; empty when clean
};

// One record at a single coupling; never throws, failures land in flags.
ScanRecord scan_point(const BathParams& p, const QcpOptions& opt = {});

// Points are solved independently, so the result does not depend on the worker count.
std::vector<ScanRecord> scan_alpha(const BathParams& base, const std::vector<double>& alphas,
                                   const QcpOptions& opt = {});
std::vector<ScanRecord> scan_alpha_serial(const BathParams& base, const std::vector<double>& alphas,
                                          const QcpOptions& opt = {});

QcpResult locate_alpha_c(const BathParams& base, Method method, const QcpOptions& opt = {});

struct EnergyDifference {
    double alpha{0.0};
    double dE{0.0};  // E_sup - E_deg
    std::string flags;
};
std::vector<EnergyDifference> energy_difference_curve(const BathParams& base, const std::vector<double>& alphas,
                                                      const QcpOptions& opt = {});

struct ReferenceValues {
    double nrg, qmc, sparse_polynomial, coherent_state;
    double sh, degenerate, superposed;  // published values of the three variational columns
};
// Static annotations for s in {1/4, 1/2, 3/4, 1}; false for any other s.
bool reference_values(double s, ReferenceValues& out);

struct Table1Row {
    double s{0.0};
    QcpResult sh, deg, sup;
    bool sh_ok{false}, deg_ok{false}, sup_ok{false};
    std::string flags;
};

struct Table1Options {
    QcpOptions qcp{};
    // Delta used for the Ohmic SH entry, whose threshold drifts with Delta.
    double ohmic_sh_delta{1e-3};
};

std::vector<Table1Row> table1_report(double delta, const std::vector<double>& s_list,
                                     const Table1Options& opt = {});

struct SensitivityRow {
    double s{0.0};
    double delta{0.0};
    double alpha_c{0.0};
    bool ok{false};
};
// Superposed alpha_c over a set of Delta values (energy crossing only).
std::vector<SensitivityRow> delta_sensitivity(const std::vector<double>& s_list, const std::vector<double>& deltas,
                                              const QcpOptions& opt = {});

}  // namespace sbqcp
