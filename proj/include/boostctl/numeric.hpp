#pragma once

#include <cmath>
#include <functional>
#include <vector>

namespace boostctl {

struct ScalarMaximum {
    double x = 0.0;
    double value = 0.0;
};

/// Golden-section search for the maximum of a unimodal function on [lo, hi].
/// Stops once the bracket is narrower than `bracket_width`.
ScalarMaximum golden_section_maximize(const std::function<double(double)>& fn, double lo, double hi,
                                      double bracket_width);

/// `count` points from `lo` to `hi` (both > 0), equally spaced in log10.
std::vector<double> log_space(double lo, double hi, int count);

}  // namespace boostctl
