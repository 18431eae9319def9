#include "sbqcp/numerics.hpp"

#include <cmath>
#include <limits>

#include "sbqcp/errors.hpp"

namespace sbqcp {

double extrapolate_zero(const std::vector<double>& xs, const std::vector<double>& ys)
{
    const std::size_t n = xs.size();
    if (n < 2 || ys.size() != n) throw DomainError("extrapolate_zero: need at least two samples");

    const double x1 = xs[n - 2], x2 = xs[n - 1];
    const double y1 = ys[n - 2], y2 = ys[n - 1];
    const double secant = x2 - y2 * (x2 - x1) / (y2 - y1);
    if (n < 3) return secant;

    const double x0 = xs[n - 3], y0 = ys[n - 3];
    // Newton divided differences.
    const double d01 = (y1 - y0) / (x1 - x0);
    const double d12 = (y2 - y1) / (x2 - x1);
    const double c2 = (d12 - d01) / (x2 - x0);
    const double c1 = d12 - c2 * (x2 + x1);
    const double c0 = y2 - c1 * x2 - c2 * x2 * x2;
    if (std::abs(c2) < 1e-14 * (std::abs(c1) + 1e-300)) return secant;

    const double disc = c1 * c1 - 4.0 * c2 * c0;
    if (disc < 0.0) return secant;
    const double q = -0.5 * (c1 + std::copysign(std::sqrt(disc), c1));
    const double r1 = q / c2;
    const double r2 = c0 / q;
    double best = std::numeric_limits<double>::quiet_NaN();
    for (double r : {r1, r2}) {
        if (!std::isfinite(r) || r < x2) continue;
        if (!std::isfinite(best) || r < best) best = r;
    }
    return std::isfinite(best) ? best : secant;
}

}  // namespace sbqcp
