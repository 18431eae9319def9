#pragma once

#include <limits>
#include <vector>

namespace sbqcp {

// Power-law bath J(w) = 2 alpha w^s wc^(1-s) theta(wc - w); wc = 1 is the energy unit.
struct BathParams {
    double s{1.0};
    double alpha{0.0};
    double delta{0.1};
    double omega_c{1.0};

    void validate() const;
};

struct QuadratureConfig {
    int panels{64};           // minimum number of log panels over [floor, 1]
    int nodes_per_panel{16};
    double omega_floor{0.0};  // 0 selects 1e-10 * min(W, a)
    double rel_tol{1e-10};
};

enum class MomentKind { I1, I2, I3, I4, Jd, K, D };

const char* to_string(MomentKind kind);

struct MomentValue {
    bool divergent{false};
    double value{0.0};

    static MomentValue finite(double v) { return {false, v}; }
    static MomentValue infinite() { return {true, std::numeric_limits<double>::infinity()}; }
};

double spectral_density(const BathParams& p, double omega);

// Integral of the requested kernel over (0, 1], checked against a refined grid.
MomentValue bath_moment(const BathParams& p, MomentKind kind, double W, double a = 0.0,
                        const QuadratureConfig& cfg = {});

enum class Scheme { logarithmic, linear };

struct DiscreteBath {
    std::vector<double> frequencies;
    std::vector<double> couplings;
    Scheme scheme{Scheme::linear};
    double lambda{2.0};

    std::size_t size() const { return frequencies.size(); }
};

DiscreteBath discretize_bath(const BathParams& p, Scheme scheme, int n_modes, double lambda = 2.0);

// Coupling-weighted sums consumed by the ansatz solvers. Each field equals
// alpha times the corresponding continuum kernel, i.e. (1/2) sum g^2 f(w),
// except k which is the K kernel itself. A DiscreteBath gives the same
// quantities as explicit mode sums.
struct KernelSums {
    double i1{0.0};
    double i2{0.0};
    double i3{0.0};
    double i4{0.0};
    double jd{0.0};
    double k{0.0};
    double i1p{0.0};  // alpha * int w^s / (w + W)^3
};

enum KernelMask : unsigned {
    kI1 = 1u,
    kI2 = 2u,
    kI3 = 4u,
    kI4 = 8u,
    kJd = 16u,
    kK = 32u,
    kI1p = 64u,
    kAll = 127u,
};

class BathSums {
public:
    virtual ~BathSums() = default;

    // W > 0, a > 0 where kI2/kI3/kI4 are requested.
    virtual KernelSums eval(double W, double a, unsigned mask) const = 0;

    // K at W = 0, i.e. the Delta = 0 polaron energy shift.
    virtual double k_at_zero() const = 0;

    // Whether the a -> 0 limit of i4 diverges (continuous spectrum reaching w = 0).
    virtual bool infrared_divergent_i4() const = 0;

    virtual double alpha() const = 0;
};

class ContinuumSums final : public BathSums {
public:
    explicit ContinuumSums(const BathParams& p, const QuadratureConfig& cfg = {});

    KernelSums eval(double W, double a, unsigned mask) const override;
    double k_at_zero() const override;
    bool infrared_divergent_i4() const override { return s_ <= 1.0; }
    double alpha() const override { return alpha_; }

private:
    double s_;
    double alpha_;
    QuadratureConfig cfg_;
};

class DiscreteSums final : public BathSums {
public:
    DiscreteSums(const DiscreteBath& bath, double alpha_label);

    KernelSums eval(double W, double a, unsigned mask) const override;
    double k_at_zero() const override;
    bool infrared_divergent_i4() const override { return false; }
    double alpha() const override { return alpha_; }

    const DiscreteBath& bath() const { return bath_; }

private:
    DiscreteBath bath_;
    double alpha_;
};

namespace detail {

// Unnormalized kernel integrals on one log grid; exposed for tests.
struct RawIntegrals {
    double i1{0.0}, i2{0.0}, i3{0.0}, i4{0.0}, jd{0.0}, kbar{0.0}, i1p{0.0}, d{0.0};
};

enum : unsigned { kD = 128u };

RawIntegrals log_grid_integrals(double s, double W, double a, unsigned mask,
                                const QuadratureConfig& cfg, double refine = 1.0);

}  // namespace detail

}  // namespace sbqcp
