#pragma once

#include <string>
#include <vector>

namespace sbqcp {

enum class Method { SH, Degenerate, Superposed };

const char* to_string(Method m);

struct BisectionStep {
    double alpha{0.0};
    bool above{false};  // true when the probe lies on the degenerate side
    double value{0.0};  // criterion-specific diagnostic (eta0, M, rho, energy gap)
};

struct QcpResult {
    double s{0.0};
    double delta{0.0};
    Method method{Method::SH};
    double alpha_c{0.0};
    double alpha_lo{0.0};
    double alpha_hi{0.0};
    std::string criterion;
    // Raw threshold bisection and the extrapolated zero of 1/ln(1/x); NaN when
    // the criterion does not produce them.
    double alpha_c_threshold{0.0};
    double alpha_c_extrapolated{0.0};
    // Independent second criterion evaluated on the same bracket (NaN if none).
    double alpha_c_cross_check{0.0};
    std::vector<BisectionStep> diagnostics;
    std::string note;
};

}  // namespace sbqcp
