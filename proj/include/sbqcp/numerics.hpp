#pragma once

#include <vector>

namespace sbqcp {

// Zero of the quadratic through three (x, y) samples that lies closest to
// the right of the last sample; falls back to the secant of the last two.
double extrapolate_zero(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace sbqcp
