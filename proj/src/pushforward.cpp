#include "polymax/pushforward.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "polymax/grid.hpp"

namespace polymax {

double LatticeMeasure::mass() const {
    double s = 0.0;
    for (double x : w) s += x;
    return s;
}

double LatticeMeasure::total_variation() const {
    double s = 0.0;
    for (double x : w) s += std::abs(x);
    return s;
}

double LatticeMeasure::at(std::int64_t k) const {
    if (k < first || k > last()) return 0.0;
    return w[static_cast<std::size_t>(k - first)];
}

LatticeDeposit::LatticeDeposit(double h, std::int64_t kmin, std::int64_t kmax)
    : h_(h), kmin_(kmin), kmax_(kmax), acc_(static_cast<std::size_t>(kmax - kmin + 1), 0.0) {
    if (!(h > 0) || kmax < kmin) throw std::invalid_argument("bad deposit lattice");
}

void LatticeDeposit::set_clamp(double lo, double hi) {
    clamp_ = true;
    clamp_lo_ = lo;
    clamp_hi_ = hi;
}

void LatticeDeposit::add_point(double c, double m) {
    if (clamp_) c = std::clamp(c, clamp_lo_, clamp_hi_);
    double s = c / h_;
    double fl = std::floor(s);
    auto k = static_cast<std::int64_t>(fl);
    double f = s - fl;
    if (k >= kmin_ && k <= kmax_) acc_[k - kmin_] += m * (1 - f);
    if (k + 1 >= kmin_ && k + 1 <= kmax_) acc_[k + 1 - kmin_] += m * f;
}

namespace {

inline double cube_pos(double y) { return y > 0 ? y * y * y : 0.0; }
inline double square_pos(double y) { return y > 0 ? y * y : 0.0; }

}  // namespace

void LatticeDeposit::add(double c, const double* widths, int count, double m) {
    double a = 0.0, b = 0.0, rest = 0.0;
    for (int i = 0; i < count; ++i) {
        double x = std::abs(widths[i]);
        if (x > a) {
            rest += b * b;
            b = a;
            a = x;
        } else if (x > b) {
            rest += b * b;
            b = x;
        } else {
            rest += x * x;
        }
    }
    if (rest > 0) b = std::sqrt(b * b + rest);
    if (b > a) std::swap(a, b);
    const double tiny = h_ / 16;
    if (a < tiny) {
        add_point(c, m);
        return;
    }
    const double span = a + (b < tiny ? 0.0 : b);
    if (clamp_) {
        double half = 0.5 * std::min(span, clamp_hi_ - clamp_lo_);
        c = std::clamp(c, clamp_lo_ + half, clamp_hi_ - half);
    }
    const double x0 = c - 0.5 * span;
    // Second antiderivative of the density, measured from x0.
    auto H2 = [&](double y) {
        if (b < tiny) return (square_pos(y) - square_pos(y - a)) / (2 * a);
        return (cube_pos(y) - cube_pos(y - b) - cube_pos(y - a) + cube_pos(y - a - b)) / (6 * a * b);
    };
    auto k0 = static_cast<std::int64_t>(std::floor(x0 / h_)) - 1;
    auto k1 = static_cast<std::int64_t>(std::ceil((x0 + span) / h_)) + 1;
    const auto len = static_cast<std::size_t>(k1 - k0 + 1);
    ramp_.resize(len + 2);
    for (std::size_t i = 0; i < len + 2; ++i) ramp_[i] = H2(static_cast<double>(k0 - 1 + static_cast<std::int64_t>(i)) * h_ - x0);
    local_.resize(len);
    double total = 0.0;
    for (std::size_t i = 0; i < len; ++i) {
        double v = std::max(0.0, (ramp_[i + 2] - 2 * ramp_[i + 1] + ramp_[i]) / h_);
        local_[i] = v;
        total += v;
    }
    if (total <= 0) {
        add_point(c, m);
        return;
    }
    const double scale = m / total;
    for (std::int64_t k = std::max(k0, kmin_); k <= std::min(k1, kmax_); ++k) acc_[k - kmin_] += local_[k - k0] * scale;
}

LatticeMeasure LatticeDeposit::finish(bool trim) const {
    LatticeMeasure out;
    out.h = h_;
    std::size_t lo = 0, hi = acc_.size();
    if (trim) {
        while (lo < hi && acc_[lo] == 0.0) ++lo;
        while (hi > lo && acc_[hi - 1] == 0.0) --hi;
    }
    out.first = kmin_ + static_cast<std::int64_t>(lo);
    out.w.assign(acc_.begin() + lo, acc_.begin() + hi);
    if (out.w.empty()) out.first = 0;
    return out;
}

AxisRule midpoint_rule(double lo, double hi, int count, const std::function<double(double)>& density) {
    if (count < 1 || !(hi > lo)) throw std::invalid_argument("bad midpoint rule");
    AxisRule r;
    const double dt = (hi - lo) / count;
    for (int i = 0; i < count; ++i) {
        double t = lo + (i + 0.5) * dt;
        double w = density(t) * dt;
        if (w == 0.0) continue;
        r.t.push_back(t);
        r.dt.push_back(dt);
        r.w.push_back(w);
    }
    return r;
}

AxisRule uniform_rule(double lo, double hi, int count, double density) {
    return midpoint_rule(lo, hi, count, [density](double) { return density; });
}

AxisRule eta_rule(int count, double scale) {
    AxisRule r = midpoint_rule(EtaWindow::lo, EtaWindow::hi, count, [](double t) { return EtaWindow::eta(t); });
    double s = 0.0;
    for (double w : r.w) s += w;
    for (double& w : r.w) w *= scale * EtaWindow::integral() / s;
    return r;
}

TensorPolynomial::TensorPolynomial(const Polynomial& p, const std::vector<AxisRule>& axes) : n_(p.dim()) {
    if (static_cast<int>(axes.size()) != n_) throw std::invalid_argument("axis count does not match dimension");
    std::vector<int> maxe(n_, 0);
    for (const auto& t : p.terms()) {
        terms_.push_back({t.coeff, t.exponent});
        for (int i = 0; i < n_; ++i) maxe[i] = std::max(maxe[i], t.exponent[i]);
    }
    pow_.resize(n_);
    for (int i = 0; i < n_; ++i) {
        pow_[i].assign(maxe[i] + 1, std::vector<double>(axes[i].t.size(), 1.0));
        for (int e = 1; e <= maxe[i]; ++e)
            for (std::size_t k = 0; k < axes[i].t.size(); ++k) pow_[i][e][k] = pow_[i][e - 1][k] * axes[i].t[k];
    }
}

void TensorPolynomial::eval(const int* idx, double& value, double* grad) const {
    value = 0.0;
    for (int i = 0; i < n_; ++i) grad[i] = 0.0;
    double f[4];
    for (const auto& term : terms_) {
        double prod = term.c;
        for (int i = 0; i < n_; ++i) {
            f[i] = pow_[i][term.e[i]][idx[i]];
            prod *= f[i];
        }
        value += prod;
        for (int i = 0; i < n_; ++i) {
            if (term.e[i] == 0) continue;
            double g = term.c * term.e[i] * pow_[i][term.e[i] - 1][idx[i]];
            for (int k = 0; k < n_; ++k)
                if (k != i) g *= f[k];
            grad[i] += g;
        }
    }
}

double TensorPolynomial::value(const int* idx) const {
    double v = 0.0;
    for (const auto& term : terms_) {
        double prod = term.c;
        for (int i = 0; i < n_; ++i) prod *= pow_[i][term.e[i]][idx[i]];
        v += prod;
    }
    return v;
}

LatticeMeasure pushforward(const PushforwardSpec& spec, const std::vector<AxisRule>& axes, double h, std::int64_t kmin,
                           std::int64_t kmax) {
    if (!spec.main) throw std::invalid_argument("pushforward needs a polynomial");
    const int n = spec.main->dim();
    if (n > 4) throw std::invalid_argument("pushforward supports n <= 4");
    TensorPolynomial main(*spec.main, axes);
    std::optional<TensorPolynomial> comp, region;
    if (spec.comparison) comp.emplace(*spec.comparison, axes);
    if (spec.region != Region::All) {
        if (!spec.region_poly) throw std::invalid_argument("region test needs a polynomial");
        region.emplace(*spec.region_poly, axes);
    }
    LatticeDeposit dep(h, kmin, kmax);
    if (spec.clamp_radius) dep.set_clamp(-*spec.clamp_radius, *spec.clamp_radius);
    for (const auto& a : axes)
        if (a.t.empty()) return dep.finish();
    int idx[4] = {0, 0, 0, 0};
    double grad[4], widths[4];
    const double thr2 = spec.threshold * spec.threshold;
    while (true) {
        double wt = 1.0;
        for (int i = 0; i < n; ++i) wt *= axes[i].w[idx[i]];
        bool keep = true;
        if (region) {
            double v;
            region->eval(idx, v, grad);
            double g2 = 0.0;
            for (int i = 0; i < n; ++i) g2 += grad[i] * grad[i];
            keep = spec.region == Region::GradientAbove ? g2 > thr2 : g2 <= thr2;
        }
        if (keep && wt != 0.0) {
            double v;
            main.eval(idx, v, grad);
            for (int i = 0; i < n; ++i) widths[i] = spec.scale * grad[i] * axes[i].dt[idx[i]];
            dep.add(spec.scale * v, widths, n, wt);
            if (comp) {
                comp->eval(idx, v, grad);
                for (int i = 0; i < n; ++i) widths[i] = spec.scale * grad[i] * axes[i].dt[idx[i]];
                dep.add(spec.scale * v, widths, n, -wt);
            }
        }
        int i = 0;
        while (i < n && ++idx[i] == static_cast<int>(axes[i].t.size())) idx[i++] = 0;
        if (i == n) break;
    }
    return dep.finish();
}

std::vector<double> gradient_bounds(const Polynomial& p, const std::vector<double>& lo, const std::vector<double>& hi) {
    const int n = p.dim();
    std::vector<double> g(n, 0.0);
    for (const auto& t : p.terms()) {
        for (int i = 0; i < n; ++i) {
            if (t.exponent[i] == 0) continue;
            double v = std::abs(t.coeff) * t.exponent[i];
            for (int k = 0; k < n; ++k) {
                int e = t.exponent[k] - (k == i ? 1 : 0);
                v *= ipow(std::max(std::abs(lo[k]), std::abs(hi[k])), e);
            }
            g[i] += v;
        }
    }
    return g;
}

double value_bound(const Polynomial& p, const std::vector<double>& lo, const std::vector<double>& hi) {
    double s = 0.0;
    for (const auto& t : p.terms()) {
        double v = std::abs(t.coeff);
        for (int k = 0; k < p.dim(); ++k) v *= ipow(std::max(std::abs(lo[k]), std::abs(hi[k])), t.exponent[k]);
        s += v;
    }
    return s;
}

std::vector<int> choose_nodes(const std::vector<const Polynomial*>& polys, const std::vector<double>& lo,
                              const std::vector<double>& hi, double h, const NodePolicy& policy) {
    const int n = static_cast<int>(lo.size());
    // bins[i]: lattice bins swept by the whole box along axis i.
    std::vector<double> bins(n, 0.0);
    for (const auto* p : polys) {
        if (!p) continue;
        auto g = gradient_bounds(*p, lo, hi);
        for (int i = 0; i < n; ++i) bins[i] = std::max(bins[i], g[i] * (hi[i] - lo[i]) / h);
    }
    std::vector<int> k(n);
    for (int i = 0; i < n; ++i)
        k[i] = static_cast<int>(std::clamp(std::ceil(bins[i] / policy.bins_per_cell), static_cast<double>(policy.min_nodes),
                                           static_cast<double>(policy.max_nodes)));
    auto cost = [&](bool work) {
        double cells = 1.0, span = 1.0;
        for (int i = 0; i < n; ++i) {
            cells *= k[i];
            span += bins[i] / k[i];
        }
        return work ? cells * span : cells;
    };
    while (cost(false) > static_cast<double>(policy.budget) || cost(true) > policy.work_budget) {
        int big = static_cast<int>(std::max_element(k.begin(), k.end()) - k.begin());
        if (k[big] <= policy.min_nodes) break;
        k[big] = std::max(policy.min_nodes, static_cast<int>(k[big] / 1.25));
    }
    return k;
}

}  // namespace polymax
