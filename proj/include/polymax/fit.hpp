#pragma once

#include <vector>

namespace polymax {

struct LineFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    std::size_t points = 0;
};

// Ordinary least squares y = intercept + slope x; r2 is 1 when y is constant.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);
// Least squares y = c x through the origin.
double fit_through_origin(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace polymax
