#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "polymax/polynomial.hpp"

namespace polymax {

// Signed masses w[k] sitting at (first + k) * h.
struct LatticeMeasure {
    double h = 1.0;
    std::int64_t first = 0;
    std::vector<double> w;

    std::int64_t last() const { return first + static_cast<std::int64_t>(w.size()) - 1; }
    double mass() const;
    double total_variation() const;
    double at(std::int64_t k) const;
};

// Accumulates the linearised pushforward of small cells into hat-function weights on a lattice.
class LatticeDeposit {
public:
    LatticeDeposit(double h, std::int64_t kmin, std::int64_t kmax);

    // Mass m spread as the sum of uniform variables of the given widths, centred at c.
    void add(double c, const double* widths, int count, double m);
    void add_point(double c, double m);
    // Deposits are translated so their support stays inside [lo, hi].
    void set_clamp(double lo, double hi);
    LatticeMeasure finish(bool trim = true) const;
    double h() const { return h_; }

private:
    double h_;
    std::int64_t kmin_, kmax_;
    std::vector<double> acc_;
    std::vector<double> local_, ramp_;
    bool clamp_ = false;
    double clamp_lo_ = 0.0, clamp_hi_ = 0.0;
};

struct AxisRule {
    std::vector<double> t;
    std::vector<double> dt;
    std::vector<double> w;
};

// Composite midpoint rule with `count` cells on [lo, hi]; weight = dt * density(t).
AxisRule midpoint_rule(double lo, double hi, int count, const std::function<double(double)>& density);
AxisRule uniform_rule(double lo, double hi, int count, double density);
// Midpoint rule for eta, rescaled so the weights sum to scale * 2.25 exactly.
AxisRule eta_rule(int count, double scale = 1.0);

// Polynomial with power tables bound to a tensor rule.
class TensorPolynomial {
public:
    TensorPolynomial(const Polynomial& p, const std::vector<AxisRule>& axes);

    int dim() const { return n_; }
    void eval(const int* idx, double& value, double* grad) const;
    double value(const int* idx) const;

private:
    struct Term {
        double c;
        std::vector<int> e;
    };
    int n_;
    std::vector<Term> terms_;
    std::vector<std::vector<std::vector<double>>> pow_;  // pow_[axis][e][node]
};

enum class Region { All, GradientAbove, GradientAtMost };

struct PushforwardSpec {
    const Polynomial* main = nullptr;
    const Polynomial* comparison = nullptr;  // deposited with negative sign
    Region region = Region::All;
    const Polynomial* region_poly = nullptr;  // gradient tested against threshold
    double threshold = 0.0;
    double scale = 1.0;  // values are multiplied by scale before deposit
    std::optional<double> clamp_radius;
};

LatticeMeasure pushforward(const PushforwardSpec& spec, const std::vector<AxisRule>& axes, double h, std::int64_t kmin,
                           std::int64_t kmax);

// Upper bound of |d/dt_i P| on the box prod [lo_i, hi_i] with lo_i >= 0.
std::vector<double> gradient_bounds(const Polynomial& p, const std::vector<double>& lo, const std::vector<double>& hi);
// Upper bound of |P| on the box.
double value_bound(const Polynomial& p, const std::vector<double>& lo, const std::vector<double>& hi);

struct NodePolicy {
    int min_nodes = 16;
    int max_nodes = 1024;
    std::int64_t budget = 1 << 16;
    double bins_per_cell = 16.0;
    double work_budget = 1 << 22;  // cells times lattice bins touched per cell
};

// Per-axis cell counts so that one cell moves the value by about bins_per_cell * h,
// reduced towards min_nodes while the node or deposit work budget is exceeded.
std::vector<int> choose_nodes(const std::vector<const Polynomial*>& polys, const std::vector<double>& lo,
                              const std::vector<double>& hi, double h, const NodePolicy& policy);

}  // namespace polymax
