#include "polymax/oscillatory.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <numbers>
#include <random>

#include "polymax/grid.hpp"

namespace polymax {

namespace {

constexpr int kMaxDim = 4;

double box_lo() { return EtaWindow::lo; }
double box_hi() { return EtaWindow::hi; }

std::vector<double> box(int n, double x) { return std::vector<double>(static_cast<std::size_t>(n), x); }

bool same_polynomial(const Polynomial& a, const Polynomial& b) { return a.as_map() == b.as_map(); }

// Eta mass of the region on the given tensor rule.
double region_mass(const Polynomial* region_poly, MeasureRegion region, double level, const std::vector<AxisRule>& axes) {
    const int n = static_cast<int>(axes.size());
    std::optional<TensorPolynomial> rp;
    if (region != MeasureRegion::Full) rp.emplace(*region_poly, axes);
    int idx[kMaxDim] = {0, 0, 0, 0};
    double grad[kMaxDim];
    double total = 0.0;
    const double l2 = level * level;
    while (true) {
        double w = 1.0;
        for (int i = 0; i < n; ++i) w *= axes[i].w[idx[i]];
        bool keep = true;
        if (rp) {
            double v;
            rp->eval(idx, v, grad);
            double g2 = 0.0;
            for (int i = 0; i < n; ++i) g2 += grad[i] * grad[i];
            keep = region == MeasureRegion::Nondegenerate ? g2 > l2 : g2 <= l2;
        }
        if (keep) total += w;
        int i = 0;
        while (i < n && ++idx[i] == static_cast<int>(axes[i].t.size())) idx[i++] = 0;
        if (i == n) break;
    }
    return total;
}

// Min of |grad p| over a midpoint grid of the region; 0 when the region has no grid point.
double gradient_floor(const Polynomial& p, MeasureRegion region, double level) {
    const int n = p.dim();
    const int per_axis = std::max(8, static_cast<int>(std::pow(double(1 << 18), 1.0 / n)));
    std::vector<AxisRule> axes(static_cast<std::size_t>(n), uniform_rule(EtaWindow::lo, EtaWindow::hi, per_axis, 1.0));
    TensorPolynomial tp(p, axes);
    int idx[kMaxDim] = {0, 0, 0, 0};
    double grad[kMaxDim];
    double best = HUGE_VAL;
    while (true) {
        double v;
        tp.eval(idx, v, grad);
        double g2 = 0.0;
        for (int i = 0; i < n; ++i) g2 += grad[i] * grad[i];
        bool keep = region == MeasureRegion::Full || (region == MeasureRegion::Nondegenerate ? g2 > level * level : g2 <= level * level);
        if (keep) best = std::min(best, std::sqrt(g2));
        int i = 0;
        while (i < n && ++idx[i] == per_axis) idx[i++] = 0;
        if (i == n) break;
    }
    return best == HUGE_VAL ? 0.0 : best;
}

Region to_region(MeasureRegion r) {
    switch (r) {
        case MeasureRegion::Full: return Region::All;
        case MeasureRegion::Nondegenerate: return Region::GradientAbove;
        case MeasureRegion::Degenerate: return Region::GradientAtMost;
    }
    return Region::All;
}

double rational_dot(const std::vector<Rational>& a, const IntVec& k) {
    Rational s(0);
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * Rational(k[i]);
    return to_double(s);
}

}  // namespace

std::string region_name(MeasureRegion r) {
    switch (r) {
        case MeasureRegion::Full: return "full";
        case MeasureRegion::Nondegenerate: return "nondegenerate";
        case MeasureRegion::Degenerate: return "degenerate";
    }
    return "full";
}

double OscMeasure::histogram_radius() const {
    double r = 0.0;
    for (std::size_t k = 0; k < density.w.size(); ++k) {
        if (density.w[k] == 0.0) continue;
        double x = std::abs(static_cast<double>(density.first + static_cast<std::int64_t>(k))) + 0.5;
        r = std::max(r, x * density.h);
    }
    return r;
}

OscMeasure build_measure(const Polynomial& p, const VertexData& v, std::size_t j, const IntVec& q,
                         MeasureRegion region, double level, const MeasureOptions& opts) {
    const int n = p.dim();
    if (n > kMaxDim) throw std::invalid_argument("measures support n <= 4");
    if (!(opts.dilation > 0)) throw std::invalid_argument("dilation must be positive");
    OscMeasure m;
    m.vertex = j;
    m.q = q;
    m.zero_coordinates = v.has_zero_coords();
    m.region = region;
    m.level = level;
    m.dilation = opts.dilation;

    Polynomial main = tilde_rescale(p, v.vertex, q).as_polynomial();
    Polynomial comp = m.zero_coordinates ? lambda0_split(main, v.vertex, v.zero_coords).lambda0
                                         : Polynomial(n, {{v.vertex, main.coeff(v.vertex)}});
    m.main = main;
    m.comparison = comp;
    auto lo = box(n, box_lo()), hi = box(n, box_hi());
    m.radius = opts.dilation * std::max(value_bound(main, lo, hi), value_bound(comp, lo, hi));
    m.bin_width = opts.bin_width ? *opts.bin_width : m.radius / std::exp2(opts.bins_exponent);
    if (!(m.bin_width > 0)) throw std::invalid_argument("bin width must be positive");
    m.density.h = m.bin_width;

    auto counts = choose_nodes({&main, &comp}, lo, hi, m.bin_width / opts.dilation, opts.policy);
    std::vector<AxisRule> axes;
    for (int i = 0; i < n; ++i) axes.push_back(eta_rule(counts[i]));
    m.region_mass = region_mass(&comp, region, level, axes);
    m.tv_bound = 2.0 * m.region_mass;
    m.vanishing = same_polynomial(main, comp) || m.region_mass == 0.0;
    m.gradient_floor = opts.dilation * gradient_floor(comp, region, level);
    if (m.vanishing) return m;

    const auto reach = static_cast<std::int64_t>(std::floor(m.radius / m.bin_width));
    PushforwardSpec spec;
    spec.main = &*m.main;
    spec.comparison = &*m.comparison;
    spec.region = to_region(region);
    spec.region_poly = &*m.comparison;
    spec.threshold = level;
    spec.scale = opts.dilation;
    spec.clamp_radius = static_cast<double>(reach) * m.bin_width;
    m.density = pushforward(spec, axes, m.bin_width, -reach - 1, reach + 1);
    return m;
}

OscMeasure build_slice_measure(const Polynomial& p, const NewtonDiagram& d, std::size_t j, std::int64_t N, int m,
                               const IntVec& kbar, const MeasureOptions& opts) {
    if (j >= d.vertices.size()) throw std::out_of_range("vertex index out of range");
    const auto& v = d.vertices[j];
    if (v.has_zero_coords()) throw std::invalid_argument("slice measures need a vertex without zero coordinates");
    auto q = slice_index(v, N, m, kbar);
    if (!q) {
        OscMeasure z;
        z.vertex = j;
        z.vanishing = true;
        z.dilation = opts.dilation;
        return z;
    }
    return build_measure(p, v, j, *q, MeasureRegion::Full, 0.0, opts);
}

OscMeasure build_zero_measure(const Polynomial& p, const NewtonDiagram& d, std::size_t j, const IntVec& kbar,
                              const IntVec& lbar, MeasureRegion region, double theta, const MeasureOptions& opts) {
    if (j >= d.vertices.size()) throw std::out_of_range("vertex index out of range");
    const auto& v = d.vertices[j];
    if (!v.has_zero_coords()) throw std::invalid_argument("zero-coordinate measures need a zero coordinate");
    if (!(theta > 0)) throw std::invalid_argument("theta must be positive");
    double level = nondegenerate_level(v, kbar, theta);
    auto q = zero_coordinate_index(v, kbar, lbar);
    if (!q) {
        OscMeasure z;
        z.vertex = j;
        z.zero_coordinates = true;
        z.region = region;
        z.level = level;
        z.vanishing = true;
        z.dilation = opts.dilation;
        return z;
    }
    return build_measure(p, v, j, *q, region, level, opts);
}

std::optional<IntVec> first_integral_offset(const VertexData& v, std::int64_t N, int m) {
    const int n = v.dim();
    const int len = n - 1;
    const std::int64_t d = v.d;
    std::optional<IntVec> best;
    std::int64_t best_sum = 0;
    IntVec k(static_cast<std::size_t>(len), 0);
    while (true) {
        std::int64_t s = 0;
        for (auto x : k) s += x;
        if ((!best || s < best_sum || (s == best_sum && k < *best)) && slice_index(v, N, m, k)) {
            best = k;
            best_sum = s;
        }
        int i = len - 1;
        while (i >= 0 && ++k[i] == d) k[i--] = 0;
        if (i < 0) break;
    }
    return best;
}

double slice_dilation(const VertexData& v, int m, const IntVec& kbar) {
    auto sc = scaling_constants(v);
    if (m < 0 || m >= v.dim()) throw std::invalid_argument("bad slot");
    const auto& sigma = sc.sigma_slot[static_cast<std::size_t>(m)];
    if (kbar.size() != sigma.size()) throw std::invalid_argument("offset vector has wrong length");
    return std::exp2(-rational_dot(sigma, kbar));
}

double nondegenerate_level(const VertexData& v, const IntVec& kbar, double theta) {
    if (v.gamma.empty()) return 1.0;
    if (kbar.size() != v.gamma.size()) throw std::invalid_argument("offset vector has wrong length");
    return std::exp2(-theta * rational_dot(v.gamma, kbar));
}

LatticeMeasure resample(const LatticeMeasure& m, double factor, double h) {
    if (!(factor > 0) || !(h > 0)) throw std::invalid_argument("factor and lattice step must be positive");
    if (m.w.empty()) {
        LatticeMeasure z;
        z.h = h;
        return z;
    }
    double a = factor * static_cast<double>(m.first) * m.h / h, b = factor * static_cast<double>(m.last()) * m.h / h;
    LatticeDeposit dep(h, static_cast<std::int64_t>(std::floor(a)) - 2, static_cast<std::int64_t>(std::ceil(b)) + 2);
    for (std::size_t k = 0; k < m.w.size(); ++k)
        if (m.w[k] != 0.0) dep.add_point(factor * static_cast<double>(m.first + static_cast<std::int64_t>(k)) * m.h, m.w[k]);
    return dep.finish();
}

double cdf_distance(const LatticeMeasure& a, const LatticeMeasure& b) {
    std::size_t i = 0, j = 0;
    double fa = 0.0, fb = 0.0, total = 0.0;
    double prev = 0.0;
    bool started = false;
    auto pos = [](const LatticeMeasure& m, std::size_t k) { return static_cast<double>(m.first + static_cast<std::int64_t>(k)) * m.h; };
    while (i < a.w.size() || j < b.w.size()) {
        double xa = i < a.w.size() ? pos(a, i) : HUGE_VAL;
        double xb = j < b.w.size() ? pos(b, j) : HUGE_VAL;
        double x = std::min(xa, xb);
        if (started) total += std::abs(fa - fb) * (x - prev);
        if (xa == x) fa += a.w[i++];
        if (xb == x) fb += b.w[j++];
        prev = x;
        started = true;
    }
    return total;
}

std::complex<double> lattice_transform(const LatticeMeasure& m, double xi) {
    double re = 0.0, im = 0.0;
    for (std::size_t k = 0; k < m.w.size(); ++k) {
        double x = static_cast<double>(m.first + static_cast<std::int64_t>(k)) * m.h;
        re += m.w[k] * std::cos(xi * x);
        im -= m.w[k] * std::sin(xi * x);
    }
    return {re, im};
}

std::pair<double, double> small_band(const OscMeasure& m, const FrequencyBands& bands) {
    if (!(m.radius > 0)) throw std::invalid_argument("measure has no support radius");
    return {bands.small_lo / m.radius, bands.small_hi / m.radius};
}

std::pair<double, double> large_band(const OscMeasure& m, const FrequencyBands& bands) {
    double g = m.gradient_floor;
    if (!(g > 0)) g = m.level > 0 ? m.level : m.bin_width;
    if (!(g > 0)) throw std::invalid_argument("measure has no gradient scale");
    return {bands.large_lo / g, bands.large_hi / g};
}

std::vector<double> frequency_grid(const OscMeasure& m, const FrequencyBands& bands) {
    if (bands.per_band < 2) throw std::invalid_argument("need at least two frequencies per band");
    std::vector<double> xi;
    for (auto [lo, hi] : {small_band(m, bands), large_band(m, bands)}) {
        if (!(lo > 0) || !(hi > lo)) throw std::invalid_argument("bad frequency band");
        for (int i = 0; i < bands.per_band; ++i) xi.push_back(lo * std::pow(hi / lo, static_cast<double>(i) / (bands.per_band - 1)));
    }
    std::sort(xi.begin(), xi.end());
    return xi;
}

namespace {

// Nodes and weights on [-1, 1].
const std::pair<std::vector<double>, std::vector<double>>& gauss_legendre(int n) {
    static std::map<int, std::pair<std::vector<double>, std::vector<double>>> cache;
    auto it = cache.find(n);
    if (it != cache.end()) return it->second;
    std::vector<double> x(static_cast<std::size_t>(n)), w(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5)), dp = 1.0;
        for (int it2 = 0; it2 < 100; ++it2) {
            double p0 = 1.0, p1 = z;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0, p1 = z;
            dp = n * (z * p1 - p0) / (z * z - 1.0);
            double dz = p1 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        x[static_cast<std::size_t>(i)] = z;
        w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - z * z) * dp * dp);
    }
    return cache.emplace(n, std::make_pair(std::move(x), std::move(w))).first->second;
}

// Rounds up to four orders per octave so that the rule cache stays small.
int rounded_order(int k) {
    if (k <= 16) return k;
    const int step = 1 << (std::bit_width(static_cast<unsigned>(k)) - 3);
    return (k + step - 1) / step * step;
}

constexpr double kPanels[] = {0.5, 0.75, 1.0, 1.5, 2.0, 3.0, 4.0};
constexpr int kPanelCount = 6;

struct Term {
    double c;
    int e[kMaxDim];
};

std::vector<Term> terms_of(const Polynomial& p, double scale) {
    std::vector<Term> out;
    for (const auto& t : p.terms()) {
        Term x{t.coeff * scale, {0, 0, 0, 0}};
        for (int i = 0; i < p.dim(); ++i) x.e[i] = t.exponent[i];
        out.push_back(x);
    }
    return out;
}

class PanelQuadrature {
public:
    struct Sum {
        std::complex<double> value{0.0, 0.0};
        double mean_value = 0.0;
        std::int64_t nodes = 0;
    };

    PanelQuadrature(const OscMeasure& m, const FourierOptions& o)
        : n_(m.main->dim()),
          main_(*m.main),
          comp_(*m.comparison),
          dilation_(m.dilation),
          region_(m.region),
          level2_(m.level * m.level),
          opts_(o),
          main_terms_(terms_of(*m.main, m.dilation)),
          comp_terms_(terms_of(*m.comparison, m.dilation)),
          region_terms_(terms_of(*m.comparison, 1.0)) {}

    Sum integrate(double xi, int refine) const {
        Sum s;
        std::vector<double> t(static_cast<std::size_t>(n_), 1.0), lo(n_, EtaWindow::lo), hi(n_, EtaWindow::hi);
        outer(n_ - 1, xi, refine, t, lo, hi, 1.0, s);
        return s;
    }

private:
    int count(double xi, double g, double len, int refine) const {
        double phase = opts_.oversample * std::abs(xi) * g * len / std::numbers::pi;
        return rounded_order(refine * (opts_.base_nodes + static_cast<int>(std::ceil(phase))));
    }

    double axis_gradient(int axis, const std::vector<double>& lo, const std::vector<double>& hi) const {
        return dilation_ * std::max(gradient_bounds(main_, lo, hi)[axis], gradient_bounds(comp_, lo, hi)[axis]);
    }

    void outer(int axis, double xi, int refine, std::vector<double>& t, std::vector<double>& lo, std::vector<double>& hi,
               double w, Sum& s) const {
        if (axis == 0) {
            leaf(xi, refine, t, w, s);
            return;
        }
        for (int p = 0; p < kPanelCount; ++p) {
            double a = kPanels[p], b = kPanels[p + 1];
            lo[axis] = a;
            hi[axis] = b;
            int k = count(xi, axis_gradient(axis, lo, hi), b - a, refine);
            const auto& [gx, gw] = gauss_legendre(k);
            for (int i = 0; i < k; ++i) {
                double x = 0.5 * (a + b) + 0.5 * (b - a) * gx[i];
                double e = EtaWindow::eta(x);
                if (e == 0.0) continue;
                t[axis] = lo[axis] = hi[axis] = x;
                outer(axis - 1, xi, refine, t, lo, hi, w * 0.5 * (b - a) * gw[i] * e, s);
            }
        }
        lo[axis] = EtaWindow::lo;
        hi[axis] = EtaWindow::hi;
    }

    // Univariate coefficients in t_0 with the other coordinates fixed; d selects a partial derivative.
    void collapse(const std::vector<Term>& terms, const std::vector<double>& t, int d, std::vector<double>& c) const {
        std::fill(c.begin(), c.end(), 0.0);
        for (const auto& x : terms) {
            double v = x.c;
            for (int k = 1; k < n_; ++k) {
                int e = x.e[k];
                if (k == d) {
                    if (e == 0) {
                        v = 0.0;
                        break;
                    }
                    v *= e;
                    e -= 1;
                }
                v *= ipow(t[k], e);
            }
            c[static_cast<std::size_t>(x.e[0])] += v;
        }
    }

    static double horner(const std::vector<double>& c, double x) {
        double v = 0.0;
        for (std::size_t i = c.size(); i-- > 0;) v = v * x + c[i];
        return v;
    }

    static double derivative(const std::vector<double>& c, double x) {
        double v = 0.0;
        for (std::size_t i = c.size(); i-- > 1;) v = v * x + static_cast<double>(i) * c[i];
        return v;
    }

    static double slope_bound(const std::vector<double>& c, double a, double b) {
        double m = std::max(std::abs(a), std::abs(b)), s = 0.0;
        for (std::size_t i = 1; i < c.size(); ++i) s += static_cast<double>(i) * std::abs(c[i]) * ipow(m, static_cast<int>(i) - 1);
        return s;
    }

    void leaf(double xi, int refine, const std::vector<double>& t, double w, Sum& s) const {
        const std::size_t deg = static_cast<std::size_t>(std::max(main_.degree(), comp_.degree())) + 1;
        std::vector<double> a(deg), b(deg), r;
        std::vector<std::vector<double>> dr;
        collapse(main_terms_, t, -1, a);
        collapse(comp_terms_, t, -1, b);
        const bool region = region_ != MeasureRegion::Full;
        if (region) {
            r.resize(deg);
            collapse(region_terms_, t, -1, r);
            for (int k = 1; k < n_; ++k) {
                dr.emplace_back(deg);
                collapse(region_terms_, t, k, dr.back());
            }
        }
        for (int p = 0; p < kPanelCount; ++p) {
            double lo = kPanels[p], hi = kPanels[p + 1];
            int k = count(xi, std::max(slope_bound(a, lo, hi), slope_bound(b, lo, hi)), hi - lo, refine);
            s.nodes += k;
            if (s.nodes > opts_.max_nodes) throw FourierError("oscillatory quadrature exceeds the node budget at xi = " + std::to_string(xi), xi);
            const auto& [gx, gw] = gauss_legendre(k);
            for (int i = 0; i < k; ++i) {
                double x = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gx[i];
                double e = EtaWindow::eta(x);
                if (e == 0.0) continue;
                if (region) {
                    double g0 = derivative(r, x), g2 = g0 * g0;
                    for (const auto& c : dr) {
                        double gk = horner(c, x);
                        g2 += gk * gk;
                    }
                    bool keep = region_ == MeasureRegion::Nondegenerate ? g2 > level2_ : g2 <= level2_;
                    if (!keep) continue;
                }
                double wt = w * 0.5 * (hi - lo) * gw[i] * e;
                double va = horner(a, x), vb = horner(b, x);
                double sd = std::sin(0.5 * xi * (va - vb));
                double c = 0.5 * xi * (va + vb);
                double f = -2.0 * wt * sd;
                s.value += std::complex<double>(f * std::sin(c), f * std::cos(c));
                s.mean_value += wt * std::abs(va - vb);
            }
        }
    }

    int n_;
    const Polynomial& main_;
    const Polynomial& comp_;
    double dilation_;
    MeasureRegion region_;
    double level2_;
    FourierOptions opts_;
    std::vector<Term> main_terms_, comp_terms_, region_terms_;
};

}  // namespace

FourierProfile fourier_transform(const OscMeasure& m, const std::vector<double>& xi, const FourierOptions& opts) {
    FourierProfile prof;
    prof.xi = xi;
    prof.radius = m.radius;
    prof.tv_bound = m.tv_bound;
    prof.vanishing = m.vanishing;
    const std::size_t count = xi.size();
    prof.value.assign(count, {0.0, 0.0});
    prof.magnitude.assign(count, 0.0);
    prof.change.assign(count, 0.0);
    prof.nodes.assign(count, 0);
    prof.mean_value_bound.assign(count, 0.0);
    if (m.vanishing) return prof;

    PanelQuadrature quad(m, opts);
    const double floor_abs = opts.noise_floor * std::max(1.0, m.tv_bound);
    for (std::size_t k = 0; k < count; ++k) {
        const double x = xi[k];
        if (x == 0.0) continue;
        int refine = 1;
        auto coarse = quad.integrate(x, refine);
        while (true) {
            auto fine = quad.integrate(x, 2 * refine);
            double diff = std::abs(coarse.value - fine.value);
            if (diff <= opts.tolerance * std::abs(fine.value) + floor_abs) {
                prof.value[k] = fine.value;
                prof.magnitude[k] = std::abs(fine.value);
                prof.change[k] = diff;
                prof.nodes[k] = fine.nodes;
                prof.mean_value_bound[k] = std::abs(x) * fine.mean_value;
                break;
            }
            coarse = fine;
            refine *= 2;
        }
    }
    return prof;
}

DecayFit decay_fit(const FourierProfile& p, double lo, double hi, double noise_floor, bool tail_envelope) {
    std::vector<std::size_t> band;
    for (std::size_t k = 0; k < p.xi.size(); ++k)
        if (p.xi[k] >= lo * (1 - 1e-12) && p.xi[k] <= hi * (1 + 1e-12)) band.push_back(k);
    if (band.size() < 8) throw std::invalid_argument("decay fit needs 8 frequencies in the band");
    std::sort(band.begin(), band.end(), [&](std::size_t a, std::size_t b) { return p.xi[a] < p.xi[b]; });
    std::vector<double> xs, ys, lx, ly;
    for (auto k : band) {
        xs.push_back(p.xi[k]);
        ys.push_back(p.magnitude[k]);
    }
    if (tail_envelope)
        for (std::size_t i = ys.size() - 1; i-- > 0;) ys[i] = std::max(ys[i], ys[i + 1]);
    for (std::size_t i = 0; i < xs.size(); ++i)
        if (ys[i] > noise_floor) {
            lx.push_back(std::log(xs[i]));
            ly.push_back(std::log(ys[i]));
        }
    DecayFit f;
    f.tail_envelope = tail_envelope;
    f.points = lx.size();
    if (lx.size() < 2) {
        f.vanishing = true;
        return f;
    }
    f.line = fit_line(lx, ly);
    f.origin_constant = fit_through_origin(xs, ys);
    return f;
}

double l1_shift_outside(const LatticeMeasure& m, double y, double cutoff) {
    if (m.w.empty() || y == 0.0) return 0.0;
    const double h = m.h;
    const auto len = static_cast<std::int64_t>(m.w.size());
    // Bin k (relative) covers [(first + k - 1/2) h, (first + k + 1/2) h).
    const double e0 = (static_cast<double>(m.first) - 0.5) * h;
    auto density = [&](double x) {
        double k = std::floor((x - e0) / h);
        if (k < 0 || k >= static_cast<double>(len)) return 0.0;
        return m.w[static_cast<std::size_t>(k)] / h;
    };
    auto measure_outside = [&](double a, double b) {
        // length of [a, b] minus (-cutoff, cutoff)
        double inside = std::max(0.0, std::min(b, cutoff) - std::max(a, -cutoff));
        return (b - a) - inside;
    };
    double total = 0.0;
    std::int64_t i = 0, j = 0;
    auto edge = [&](std::int64_t k) { return e0 + static_cast<double>(k) * h; };
    double prev = std::min(edge(0), edge(0) + y);
    while (i <= len || j <= len) {
        double xa = i <= len ? edge(i) : HUGE_VAL;
        double xb = j <= len ? edge(j) + y : HUGE_VAL;
        double x = std::min(xa, xb);
        if (x > prev) {
            double mid = 0.5 * (prev + x);
            double diff = std::abs(density(mid - y) - density(mid));
            if (diff != 0.0) total += diff * measure_outside(prev, x);
        }
        if (xa == x) ++i;
        if (xb == x) ++j;
        prev = x;
    }
    return total;
}

double l1_modulus(const OscMeasure& m, double y) {
    if (!std::isfinite(y)) throw std::invalid_argument("shift must be finite");
    if (y == 0.0 || m.vanishing) return 0.0;
    if (std::abs(y) < 2.0 * m.bin_width) throw std::invalid_argument("resolution insufficient: shift below two bins");
    return l1_shift_outside(m.density, y, 0.0);
}

double plancherel_estimate(const FourierProfile& p, double y) {
    if (p.vanishing || p.xi.size() < 2) return 0.0;
    double integral = 0.0;
    auto g = [&](std::size_t k) {
        double s = 2.0 * std::sin(0.5 * y * p.xi[k]);
        return s * s * p.magnitude[k] * p.magnitude[k];
    };
    for (std::size_t k = 1; k < p.xi.size(); ++k) integral += 0.5 * (g(k) + g(k - 1)) * (p.xi[k] - p.xi[k - 1]);
    return std::sqrt(2.0 * (p.radius + std::abs(y)) / std::numbers::pi * integral);
}

int shifted_sum_reach(const VertexData& v, int m, double radius, double y) {
    auto sc = scaling_constants(v);
    const auto& sigma = sc.sigma_slot.at(static_cast<std::size_t>(m));
    double smin = HUGE_VAL;
    for (const auto& s : sigma) smin = std::min(smin, to_double(s));
    if (!(smin > 0)) throw std::invalid_argument("slice scaling has a zero component");
    double need = std::log2(2.0 * radius / std::abs(y));
    return std::max(1, static_cast<int>(std::ceil(need / smin)) + 1);
}

ShiftedSumReport shifted_sum_bound(const Polynomial& p, const NewtonDiagram& d, std::size_t j, std::int64_t N, int m,
                                   int k_max, double y, const MeasureOptions& opts) {
    if (j >= d.vertices.size()) throw std::out_of_range("vertex index out of range");
    if (k_max < 0) throw std::invalid_argument("k_max must be nonnegative");
    const auto& v = d.vertices[j];
    const int len = v.dim() - 1;
    ShiftedSumReport rep;
    rep.y = y;
    IntVec k(static_cast<std::size_t>(len), 0);
    while (true) {
        ShiftedTerm t;
        t.kbar = k;
        t.dilation = slice_dilation(v, m, k);
        MeasureOptions o = opts;
        o.dilation = t.dilation;
        auto meas = build_slice_measure(p, d, j, N, m, k, o);
        t.defined = !meas.q.empty();
        if (t.defined && !meas.vanishing) {
            t.radius = meas.histogram_radius();
            t.excluded = t.radius < 0.5 * std::abs(y);
            t.value = l1_shift_outside(meas.density, y, 2.0 * std::abs(y));
            if (t.excluded) {
                ++rep.excluded;
                if (t.value != 0.0) ++rep.excluded_nonzero;
            } else {
                ++rep.included;
            }
            rep.sum += t.value;
        }
        rep.terms.push_back(t);
        int i = len - 1;
        while (i >= 0 && ++k[i] > k_max) k[i--] = 0;
        if (i < 0) break;
    }
    return rep;
}

SublevelCurve sublevel_measure(const Polynomial& p, const SublevelOptions& opts) {
    return sublevel_measure(p, {}, opts);
}

SublevelCurve sublevel_measure(const Polynomial& p, const std::vector<double>& levels, const SublevelOptions& opts) {
    const int n = p.dim();
    if (n > kMaxDim) throw std::invalid_argument("sublevel sets support n <= 4");
    SublevelCurve c;
    const double span = box_hi() - box_lo();
    c.box_measure = std::pow(span, n);
    const int per_axis = std::max(2, static_cast<int>(std::floor(std::pow(static_cast<double>(opts.grid_points), 1.0 / n) + 1e-9)));
    std::vector<AxisRule> axes(static_cast<std::size_t>(n), uniform_rule(box_lo(), box_hi(), per_axis, 1.0));
    TensorPolynomial tp(p, axes);
    std::vector<double> mags;
    int idx[kMaxDim] = {0, 0, 0, 0};
    double grad[kMaxDim];
    while (true) {
        double v;
        tp.eval(idx, v, grad);
        double g2 = 0.0;
        for (int i = 0; i < n; ++i) g2 += grad[i] * grad[i];
        mags.push_back(std::sqrt(g2));
        int i = 0;
        while (i < n && ++idx[i] == per_axis) idx[i++] = 0;
        if (i == n) break;
    }
    std::sort(mags.begin(), mags.end());
    c.gradient_min = mags.front();
    c.gradient_max = mags.back();
    const double cell = c.box_measure / static_cast<double>(mags.size());

    std::vector<double> samples;
    std::mt19937_64 rng(opts.seed);
    std::uniform_real_distribution<double> u(box_lo(), box_hi());
    std::vector<double> t(static_cast<std::size_t>(n));
    for (std::int64_t s = 0; s < opts.samples; ++s) {
        for (auto& x : t) x = u(rng);
        auto g = p.gradient(t);
        double g2 = 0.0;
        for (double x : g) g2 += x * x;
        samples.push_back(std::sqrt(g2));
    }
    std::sort(samples.begin(), samples.end());

    c.level = levels;
    if (c.level.empty())
        for (int i = 1; i <= opts.levels; ++i) c.level.push_back(c.gradient_max * std::exp2(-opts.ladder_step * i));
    std::vector<double> lx, ly;
    for (double s : c.level) {
        auto gcount = std::upper_bound(mags.begin(), mags.end(), s) - mags.begin();
        auto scount = std::upper_bound(samples.begin(), samples.end(), s) - samples.begin();
        double gm = static_cast<double>(gcount) * cell;
        double sm = samples.empty() ? 0.0 : static_cast<double>(scount) / static_cast<double>(samples.size()) * c.box_measure;
        c.grid_measure.push_back(gm);
        c.sample_measure.push_back(sm);
        double frac = gm / c.box_measure;
        if (gm > 0 && s > 0 && frac >= opts.min_fraction && frac <= opts.max_fraction) {
            lx.push_back(std::log(s));
            ly.push_back(std::log(gm));
        }
    }
    if (lx.size() >= 4) {
        c.fit = fit_line(lx, ly);
        c.fitted = true;
    }
    return c;
}

std::optional<int> empirical_k0(const Polynomial& p, const NewtonDiagram& d, std::size_t j, double theta, int k_max,
                                const MeasureOptions& mopts, const FourierOptions& fopts, const FrequencyBands& bands) {
    const auto& v = d.vertices.at(j);
    if (!v.has_zero_coords()) throw std::invalid_argument("k0 is defined for zero-coordinate vertices");
    const std::size_t beta = v.b_normals().size();
    for (int k = 0; k <= k_max; ++k) {
        IntVec kbar(v.zero_coords.size(), k), lbar(beta, 0);
        auto m = build_zero_measure(p, d, j, kbar, lbar, MeasureRegion::Nondegenerate, theta, mopts);
        if (m.vanishing) continue;
        auto prof = fourier_transform(m, frequency_grid(m, bands), fopts);
        auto [lo, hi] = large_band(m, bands);
        auto fit = decay_fit(prof, lo, hi, fopts.noise_floor, true);
        if (!fit.vanishing && fit.line.slope <= -1.0) return k;
    }
    return std::nullopt;
}

VertexFourierDecay vertex_fourier_decay(const Polynomial& p, const NewtonDiagram& d, std::size_t j,
                                        std::int64_t n_min, std::int64_t n_max, int m, const MeasureOptions& mopts,
                                        const FourierOptions& fopts, const FrequencyBands& bands) {
    const auto& v = d.vertices.at(j);
    if (v.has_zero_coords()) throw std::invalid_argument("slice decay needs a vertex without zero coordinates");
    if (n_min < 0 || n_max < n_min) throw std::invalid_argument("bad depth range");
    VertexFourierDecay out;
    out.vertex = j;
    out.m = m;
    out.beta = v.beta ? to_double(*v.beta) : 0.0;
    std::vector<double> x, y;
    for (std::int64_t N = n_min; N <= n_max; ++N) {
        SliceFourierPoint pt;
        pt.N = N;
        auto kbar = first_integral_offset(v, N, m);
        if (!kbar) throw std::logic_error("no integral slice offset");
        pt.kbar = *kbar;
        auto meas = build_slice_measure(p, d, j, N, m, *kbar, mopts);
        pt.radius = meas.radius;
        pt.gradient_floor = meas.gradient_floor;
        pt.mass = meas.mass();
        pt.total_variation = meas.total_variation();
        pt.vanishing = meas.vanishing;
        if (!meas.vanishing) {
            auto prof = fourier_transform(meas, frequency_grid(meas, bands), fopts);
            auto [slo, shi] = small_band(meas, bands);
            pt.small = decay_fit(prof, slo, shi, fopts.noise_floor);
            if (meas.gradient_floor > 0) {
                auto [llo, lhi] = large_band(meas, bands);
                pt.large = decay_fit(prof, llo, lhi, fopts.noise_floor, true);
            } else {
                pt.large.vanishing = true;
            }
            if (pt.small.origin_constant > 0) {
                x.push_back(static_cast<double>(N));
                y.push_back(std::log2(pt.small.origin_constant));
            }
        }
        out.points.push_back(pt);
    }
    out.fitted = x.size() >= 3;
    if (out.fitted) {
        out.constant_fit = fit_line(x, y);
        out.delta = -out.constant_fit.slope;
    }
    return out;
}

nlohmann::json to_json(const OscMeasure& m) {
    nlohmann::json j;
    j["vertex"] = m.vertex;
    j["q"] = m.q;
    j["zero_coordinates"] = m.zero_coordinates;
    j["region"] = region_name(m.region);
    j["level"] = m.level;
    j["dilation"] = m.dilation;
    j["vanishing"] = m.vanishing;
    j["radius"] = m.radius;
    j["bin_width"] = m.bin_width;
    j["mass"] = m.mass();
    j["total_variation"] = m.total_variation();
    j["tv_bound"] = m.tv_bound;
    j["gradient_floor"] = m.gradient_floor;
    if (m.main) j["main"] = m.main->to_string();
    if (m.comparison) j["comparison"] = m.comparison->to_string();
    return j;
}

nlohmann::json to_json(const DecayFit& f) {
    nlohmann::json j;
    j["points"] = f.points;
    j["vanishing"] = f.vanishing;
    j["tail_envelope"] = f.tail_envelope;
    j["slope"] = f.line.slope;
    j["intercept"] = f.line.intercept;
    j["r2"] = f.line.r2;
    j["origin_constant"] = f.origin_constant;
    return j;
}

nlohmann::json to_json(const SublevelCurve& c) {
    nlohmann::json j;
    j["level"] = c.level;
    j["grid_measure"] = c.grid_measure;
    j["sample_measure"] = c.sample_measure;
    j["box_measure"] = c.box_measure;
    j["gradient_min"] = c.gradient_min;
    j["gradient_max"] = c.gradient_max;
    j["fitted"] = c.fitted;
    j["exponent"] = c.fit.slope;
    j["r2"] = c.fit.r2;
    return j;
}

nlohmann::json to_json(const VertexFourierDecay& v) {
    nlohmann::json j{{"vertex", v.vertex}, {"m", v.m}, {"beta", v.beta}, {"fitted", v.fitted}};
    if (v.fitted) {
        j["delta"] = v.delta;
        j["delta_r2"] = v.constant_fit.r2;
    }
    j["points"] = nlohmann::json::array();
    for (const auto& p : v.points)
        j["points"].push_back({{"N", p.N},
                               {"kbar", p.kbar},
                               {"radius", p.radius},
                               {"gradient_floor", p.gradient_floor},
                               {"mass", p.mass},
                               {"total_variation", p.total_variation},
                               {"vanishing", p.vanishing},
                               {"small", to_json(p.small)},
                               {"large", to_json(p.large)}});
    return j;
}

}  // namespace polymax
