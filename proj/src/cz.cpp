#include "polymax/cz.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace polymax {

namespace {

bool is_power_of_two(double x) {
    int e;
    return x > 0 && std::frexp(x, &e) == 0.5;
}

std::int64_t cell_offset(double from, double to, double dx) {
    double s = (to - from) / dx;
    auto k = static_cast<std::int64_t>(std::llround(s));
    if (std::abs(s - static_cast<double>(k)) > 1e-9) throw std::invalid_argument("grid is not aligned to dyadic intervals");
    return k;
}

GridSpec root_grid(double half, double dx) {
    GridSpec g;
    g.x_lo = -half;
    g.dx = dx;
    g.cells = static_cast<std::size_t>(std::llround(2 * half / dx));
    return g;
}

constexpr std::size_t kMaxRootCells = std::size_t{1} << 24;

}  // namespace

std::vector<double> embed(const GridFunction& f, const GridSpec& root) {
    std::vector<double> v(root.cells, 0.0);
    const std::int64_t off = cell_offset(root.x_lo, f.grid().x_lo, root.dx);
    for (std::size_t i = 0; i < f.size(); ++i) {
        std::int64_t j = off + static_cast<std::int64_t>(i);
        if (f[i] == 0.0) continue;
        if (j < 0 || j >= static_cast<std::int64_t>(root.cells)) throw std::logic_error("root does not cover the support");
        v[static_cast<std::size_t>(j)] = f[i];
    }
    return v;
}

CZResult cz_decompose(const GridFunction& f, double lambda, double amplification) {
    if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
    if (!(amplification >= 0)) throw std::invalid_argument("amplification must be nonnegative");
    const GridSpec& g = f.grid();
    if (!is_power_of_two(g.dx)) throw std::invalid_argument("grid step must be a power of two");
    cell_offset(0.0, g.x_lo, g.dx);

    CZResult r;
    r.level = lambda;
    r.amplification = amplification;
    r.threshold = std::exp2(amplification) * lambda;

    double lo = 0.0, hi = 0.0;
    bool any = false;
    for (std::size_t i = 0; i < f.size(); ++i) {
        if (f[i] == 0.0) continue;
        double a = g.x_lo + static_cast<double>(i) * g.dx;
        if (!any) lo = a;
        hi = a + g.dx;
        any = true;
    }
    double half = g.dx;
    while (half < std::max(std::abs(lo), std::abs(hi))) half *= 2;
    const double mass = f.sample_mass();
    while (mass / (2 * half) > r.threshold) half *= 2;
    r.root = root_grid(half, g.dx);
    if (r.root.cells > kMaxRootCells) throw std::invalid_argument("root interval too large for the threshold");

    std::vector<double> v = embed(f, r.root);
    const std::size_t n = v.size();
    std::vector<long double> prefix(n + 1, 0.0L);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + v[i];
    auto average = [&](std::int64_t a, std::int64_t len) {
        return static_cast<double>((prefix[a + len] - prefix[a]) / static_cast<long double>(len));
    };

    std::vector<double> good(v);
    r.bad.assign(n, 0.0);
    r.in_omega.assign(n, false);
    // Depth-first, left child first, so cubes come out sorted.
    struct Node {
        std::int64_t first, len;
        double parent;
    };
    std::vector<Node> stack{{0, static_cast<std::int64_t>(n), 0.0}};
    while (!stack.empty()) {
        Node node = stack.back();
        stack.pop_back();
        if (prefix[node.first + node.len] == prefix[node.first]) continue;
        double avg = average(node.first, node.len);
        if (avg > r.threshold) {
            DyadicCube c;
            c.first = node.first;
            c.cells = node.len;
            c.lo = r.root.x_lo + static_cast<double>(node.first) * g.dx;
            c.hi = c.lo + static_cast<double>(node.len) * g.dx;
            const long double s = prefix[node.first + node.len] - prefix[node.first];
            c.average = static_cast<double>(s / static_cast<long double>(node.len));
            c.mass = static_cast<double>(s) * g.dx;
            c.parent_average = node.parent;
            for (std::int64_t i = node.first; i < node.first + node.len; ++i) {
                good[i] = c.average;
                r.bad[i] = v[i] - c.average;
                r.in_omega[i] = true;
            }
            r.omega_measure += c.hi - c.lo;
            r.cubes.push_back(c);
            continue;
        }
        if (node.len == 1) continue;
        std::int64_t h = node.len / 2;
        stack.push_back({node.first + h, h, avg});
        stack.push_back({node.first, h, avg});
    }
    r.good = GridFunction(r.root, std::move(good));
    return r;
}

bool CZReport::passed() const { return violations() == 0; }

std::size_t CZReport::violations() const {
    return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const CZCheck& c) { return !c.passed; }));
}

CZReport cz_verify(const CZResult& r, const GridFunction& f) {
    CZReport rep;
    const double tau = r.threshold;
    const double dx = r.root.dx;
    const std::vector<double> v = embed(f, r.root);
    const std::size_t n = v.size();
    double mass = 0.0, sup = 0.0;
    for (double x : v) {
        mass += x * dx;
        sup = std::max(sup, x);
    }
    auto add = [&](const std::string& name, double measured, double bound, bool ok) {
        rep.checks.push_back({name, ok, measured, bound});
    };

    // Dyadic, disjoint, consistent with the Omega mask.
    {
        bool ok = true;
        std::vector<int> cover(n, 0);
        for (const auto& c : r.cubes) {
            bool pow2 = c.cells > 0 && (c.cells & (c.cells - 1)) == 0;
            ok = ok && pow2 && c.first % c.cells == 0 && c.first >= 0 && c.first + c.cells <= static_cast<std::int64_t>(n);
            if (!ok) break;
            for (std::int64_t i = c.first; i < c.first + c.cells; ++i) ++cover[i];
        }
        std::size_t overlaps = 0, mask = 0;
        for (std::size_t i = 0; ok && i < n; ++i) {
            if (cover[i] > 1) ++overlaps;
            if ((cover[i] > 0) != static_cast<bool>(r.in_omega[i])) ++mask;
        }
        add("disjoint dyadic cubes", static_cast<double>(overlaps + mask), 0.0, ok && overlaps == 0 && mask == 0);
    }

    double worst_avg = 0.0, worst_low = 0.0, worst_parent = 0.0, worst_mean = 0.0, worst_sep = 1e300;
    bool low_ok = true;
    for (const auto& c : r.cubes) {
        worst_avg = std::max(worst_avg, c.average / tau);
        if (!(c.average > tau)) low_ok = false;
        worst_low = std::max(worst_low, tau / c.average);
        std::int64_t plen = 2 * c.cells, pfirst = c.first - c.first % plen;
        if (pfirst + plen <= static_cast<std::int64_t>(n)) {
            double ps = 0.0;
            for (std::int64_t i = pfirst; i < pfirst + plen; ++i) ps += v[i];
            worst_parent = std::max(worst_parent, ps / static_cast<double>(plen) / tau);
        }
        long double s = 0.0L;
        for (std::int64_t i = c.first; i < c.first + c.cells; ++i) s += r.bad[i];
        worst_mean = std::max(worst_mean, std::abs(static_cast<double>(s) * dx));
        // Expanded cube of twice the length with the same centre: nearest outside point over farthest inside point.
        double half = 0.5 * (c.hi - c.lo);
        worst_sep = std::min(worst_sep, (2 * half) / half);
    }
    add("cube average at most 2 threshold", worst_avg, 2.0, worst_avg <= 2.0 * (1 + 1e-12));
    add("cube average above threshold", worst_low, 1.0, low_ok);
    add("parent average at most threshold", worst_parent, 1.0, worst_parent <= 1.0 + 1e-12);
    add("bad part has zero mean on each cube", worst_mean, 1e-12 * std::max(mass, 1e-300),
        worst_mean <= 1e-12 * mass);
    double ratio = mass > 0 ? r.omega_measure * tau / mass : 0.0;
    add("omega measure at most mass over threshold", ratio, 1.0, r.omega_measure * tau <= mass * (1 + 1e-12));

    double recon = 0.0, bad_on_f = 0.0, good_f = 0.0, good_omega = 0.0, energy = 0.0;
    std::size_t changed_on_f = 0;
    for (std::size_t i = 0; i < n; ++i) {
        double gval = r.good[i];
        recon = std::max(recon, std::abs(v[i] - gval - r.bad[i]));
        energy += gval * gval * dx;
        if (r.in_omega[i]) {
            good_omega = std::max(good_omega, gval / tau);
        } else {
            bad_on_f = std::max(bad_on_f, std::abs(r.bad[i]));
            good_f = std::max(good_f, gval / tau);
            if (gval != v[i]) ++changed_on_f;
        }
    }
    add("f equals good plus bad", recon, 1e-12 * sup, recon <= 1e-12 * std::max(sup, 1e-300));
    add("bad part vanishes off omega", bad_on_f, 0.0, bad_on_f == 0.0);
    add("good part equals f off omega", static_cast<double>(changed_on_f), 0.0, changed_on_f == 0);
    add("good part at most threshold off omega", good_f, 1.0, good_f <= 1.0);
    add("good part at most 2 threshold on omega", good_omega, 2.0, good_omega <= 2.0 * (1 + 1e-12));
    double e_ratio = mass > 0 ? energy / (tau * mass) : 0.0;
    add("good energy at most 2 threshold mass", e_ratio, 2.0, energy <= 2.0 * tau * mass * (1 + 1e-12));

    // Measure of the union of expanded cubes.
    std::vector<std::pair<double, double>> ex;
    for (const auto& c : r.cubes) {
        double half = 0.5 * (c.hi - c.lo), centre = 0.5 * (c.lo + c.hi);
        ex.emplace_back(centre - 2 * half, centre + 2 * half);
    }
    std::sort(ex.begin(), ex.end());
    double star = 0.0, cur_lo = 0.0, cur_hi = -1e300;
    for (const auto& [a, b] : ex) {
        if (a > cur_hi) {
            if (cur_hi > cur_lo) star += cur_hi - cur_lo;
            cur_lo = a;
            cur_hi = b;
        } else {
            cur_hi = std::max(cur_hi, b);
        }
    }
    if (cur_hi > cur_lo) star += cur_hi - cur_lo;
    double star_ratio = r.omega_measure > 0 ? star / r.omega_measure : 0.0;
    add("expanded cubes at most twice omega", star_ratio, 2.0, star <= 2.0 * r.omega_measure * (1 + 1e-12));
    if (r.cubes.empty()) worst_sep = 2.0;
    add("points outside expanded cube are twice as far", worst_sep, 2.0, worst_sep >= 2.0);
    return rep;
}

nlohmann::json to_json(const CZResult& r) {
    nlohmann::json j;
    j["level"] = r.level;
    j["amplification"] = r.amplification;
    j["threshold"] = r.threshold;
    j["root"] = {r.root.x_lo, r.root.x_hi()};
    j["omega_measure"] = r.omega_measure;
    auto& cubes = j["cubes"] = nlohmann::json::array();
    for (const auto& c : r.cubes)
        cubes.push_back({{"lo", c.lo}, {"hi", c.hi}, {"mass", c.mass}, {"average", c.average}, {"parent_average", c.parent_average}});
    return j;
}

nlohmann::json to_json(const CZReport& r) {
    nlohmann::json j;
    j["passed"] = r.passed();
    j["violations"] = r.violations();
    auto& checks = j["checks"] = nlohmann::json::array();
    for (const auto& c : r.checks)
        checks.push_back({{"name", c.name}, {"passed", c.passed}, {"measured", c.measured}, {"bound", c.bound}});
    return j;
}

}  // namespace polymax
