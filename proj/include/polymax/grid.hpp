#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace polymax {

struct GridSpec {
    double x_lo = 0.0;
    double dx = 1.0;
    std::size_t cells = 0;

    double x_hi() const { return x_lo + dx * static_cast<double>(cells); }
    double x(std::size_t i) const { return x_lo + (static_cast<double>(i) + 0.5) * dx; }
    bool operator==(const GridSpec& o) const { return x_lo == o.x_lo && dx == o.dx && cells == o.cells; }
};

GridSpec make_grid(double x_lo, double x_hi, double dx);

// Nonnegative samples at cell midpoints.
class GridFunction {
public:
    GridFunction(GridSpec grid, std::vector<double> values, std::optional<double> exact_mass = std::nullopt);

    static GridFunction zero(const GridSpec& grid);
    static GridFunction constant(const GridSpec& grid, double c);
    // Cell values are the covered fraction of each cell, so the step function has mass b - a exactly.
    static GridFunction indicator(const GridSpec& grid, double a, double b);

    const GridSpec& grid() const { return grid_; }
    const std::vector<double>& values() const { return values_; }
    double operator[](std::size_t i) const { return values_[i]; }
    std::size_t size() const { return values_.size(); }
    std::optional<double> exact_mass() const { return exact_mass_; }
    double mass() const;
    double sample_mass() const;
    double sup() const;
    // Linear interpolation between midpoints, zero outside the domain.
    double interpolate(double x) const;

    GridFunction scaled(double c) const;
    // Shift by a whole number of cells; mass leaving the domain is lost.
    GridFunction shifted(long cells) const;

private:
    GridSpec grid_;
    std::vector<double> values_;
    std::optional<double> exact_mass_;
};

// Smooth cutoff supported in [1/2, 4], identically 1 on [1, 2].
struct EtaWindow {
    static constexpr double lo = 0.5;
    static constexpr double hi = 4.0;
    static double transition(double x);
    static double eta(double s);
    static double integral();
};

}  // namespace polymax
