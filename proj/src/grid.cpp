#include "polymax/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polymax {

GridSpec make_grid(double x_lo, double x_hi, double dx) {
    if (!(dx > 0) || !(x_hi > x_lo)) throw std::invalid_argument("grid needs dx > 0 and x_hi > x_lo");
    double cells = (x_hi - x_lo) / dx;
    auto n = static_cast<std::size_t>(std::llround(cells));
    if (std::abs(cells - static_cast<double>(n)) > 1e-9 * cells)
        throw std::invalid_argument("domain length is not a multiple of dx");
    return {x_lo, dx, n};
}

GridFunction::GridFunction(GridSpec grid, std::vector<double> values, std::optional<double> exact_mass)
    : grid_(grid), values_(std::move(values)), exact_mass_(exact_mass) {
    if (!(grid_.dx > 0)) throw std::invalid_argument("grid step must be positive");
    if (values_.size() != grid_.cells) throw std::invalid_argument("sample count does not match grid");
    for (double v : values_)
        if (!(v >= 0) || !std::isfinite(v)) throw std::invalid_argument("grid function samples must be finite and >= 0");
    if (exact_mass_ && std::abs(*exact_mass_ - sample_mass()) > 1e-12 * std::max(1.0, *exact_mass_))
        throw std::invalid_argument("exact mass disagrees with samples");
}

GridFunction GridFunction::zero(const GridSpec& grid) { return GridFunction(grid, std::vector<double>(grid.cells, 0.0), 0.0); }

GridFunction GridFunction::constant(const GridSpec& grid, double c) {
    return GridFunction(grid, std::vector<double>(grid.cells, c));
}

GridFunction GridFunction::indicator(const GridSpec& grid, double a, double b) {
    std::vector<double> v(grid.cells, 0.0);
    for (std::size_t i = 0; i < grid.cells; ++i) {
        double lo = grid.x_lo + static_cast<double>(i) * grid.dx;
        double hi = lo + grid.dx;
        double overlap = std::min(hi, b) - std::max(lo, a);
        if (overlap > 0) v[i] = std::min(1.0, overlap / grid.dx);
    }
    GridFunction f(grid, std::move(v));
    double inside = std::min(b, grid.x_hi()) - std::max(a, grid.x_lo);
    if (std::abs(f.sample_mass() - inside) <= 1e-12 * std::max(1.0, inside)) f.exact_mass_ = f.sample_mass();
    return f;
}

double GridFunction::sample_mass() const {
    double s = 0.0;
    for (double v : values_) s += v;
    return s * grid_.dx;
}

double GridFunction::mass() const { return exact_mass_ ? *exact_mass_ : sample_mass(); }

double GridFunction::sup() const { return values_.empty() ? 0.0 : *std::max_element(values_.begin(), values_.end()); }

double GridFunction::interpolate(double x) const {
    double s = (x - grid_.x_lo) / grid_.dx - 0.5;
    double fl = std::floor(s);
    auto i = static_cast<long>(fl);
    double frac = s - fl;
    auto at = [&](long k) { return (k < 0 || k >= static_cast<long>(values_.size())) ? 0.0 : values_[k]; };
    return (1 - frac) * at(i) + frac * at(i + 1);
}

GridFunction GridFunction::scaled(double c) const {
    if (!(c >= 0)) throw std::invalid_argument("scale must be nonnegative");
    std::vector<double> v(values_);
    for (auto& x : v) x *= c;
    std::optional<double> m;
    if (exact_mass_) m = *exact_mass_ * c;
    GridFunction out(grid_, std::move(v));
    if (m && std::abs(*m - out.sample_mass()) <= 1e-12 * std::max(1.0, *m)) out.exact_mass_ = m;
    return out;
}

GridFunction GridFunction::shifted(long cells) const {
    std::vector<double> v(values_.size(), 0.0);
    const long n = static_cast<long>(values_.size());
    for (long i = 0; i < n; ++i) {
        long j = i + cells;
        if (j >= 0 && j < n) v[j] = values_[i];
    }
    return GridFunction(grid_, std::move(v));
}

double EtaWindow::transition(double x) {
    auto phi = [](double y) { return y > 0 ? std::exp(-1.0 / y) : 0.0; };
    if (x <= 0) return 0.0;
    if (x >= 1) return 1.0;
    double a = phi(x), b = phi(1 - x);
    return a / (a + b);
}

double EtaWindow::eta(double s) {
    if (s <= lo || s >= hi) return 0.0;
    return transition(2 * (s - 0.5)) * transition((4 - s) / 2);
}

double EtaWindow::integral() { return 2.25; }

}  // namespace polymax
