#include "polymax/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <ostream>
#include <stdexcept>

#include "polymax/convolution.hpp"

namespace polymax {

double MaximalResult::sup() const { return values.empty() ? 0.0 : *std::max_element(values.begin(), values.end()); }

void MaximalResult::write_csv(std::ostream& os) const {
    os << "x,value,argmax\n";
    os.precision(17);
    for (std::size_t i = 0; i < values.size(); ++i) {
        os << grid.x(i) << ',' << values[i] << ',';
        for (std::size_t k = 0; k < argmax[i].size(); ++k) os << (k ? ";" : "") << argmax[i][k];
        os << '\n';
    }
}

namespace {

MaximalResult empty_result(const GridSpec& g, const std::string& name, int truncation, int nodes) {
    MaximalResult r;
    r.grid = g;
    r.values.assign(g.cells, 0.0);
    r.argmax.assign(g.cells, IntVec{});
    r.index_name = name;
    r.truncation = truncation;
    r.min_nodes = nodes;
    return r;
}

void update(MaximalResult& r, const std::vector<double>& row, const IntVec& index, bool absolute = false) {
    for (std::size_t i = 0; i < row.size(); ++i) {
        double v = absolute ? std::abs(row[i]) : std::max(0.0, row[i]);
        if (v > r.values[i] || r.argmax[i].empty()) {
            if (v > r.values[i]) r.values[i] = v;
            r.argmax[i] = index;
        }
    }
}

std::int64_t lattice_reach(const GridSpec& g) { return static_cast<std::int64_t>(g.cells) - 1; }

const GridSpec& common_grid(const FunctionBatch& fs) {
    if (fs.empty()) throw std::invalid_argument("no functions given");
    return fs[0]->grid();
}

}  // namespace

void for_each_index(int n, int q_max, const std::function<void(const IntVec&)>& visit) {
    if (n < 1 || q_max < 0) throw std::invalid_argument("bad index box");
    IntVec q(n, 0);
    while (true) {
        visit(q);
        int i = 0;
        while (i < n && ++q[i] > q_max) q[i++] = 0;
        if (i == n) break;
    }
}

LatticeMeasure box_kernel(const Polynomial& p, const std::vector<double>& lo, const std::vector<double>& hi,
                          const GridSpec& g, const NodePolicy& policy) {
    const int n = p.dim();
    auto counts = choose_nodes({&p}, lo, hi, g.dx, policy);
    std::vector<AxisRule> axes;
    for (int i = 0; i < n; ++i) axes.push_back(uniform_rule(lo[i], hi[i], counts[i], 1.0 / (hi[i] - lo[i])));
    PushforwardSpec spec;
    spec.main = &p;
    const auto reach = lattice_reach(g);
    return pushforward(spec, axes, g.dx, -reach, reach);
}

std::vector<AxisRule> eta_axes(const std::vector<const Polynomial*>& polys, const GridSpec& g, const NodePolicy& policy) {
    const int n = polys[0]->dim();
    std::vector<double> lo(n, EtaWindow::lo), hi(n, EtaWindow::hi);
    auto counts = choose_nodes(polys, lo, hi, g.dx, policy);
    std::vector<AxisRule> axes;
    for (int i = 0; i < n; ++i) axes.push_back(eta_rule(counts[i]));
    return axes;
}

LatticeMeasure eta_pushforward(const Polynomial& p, const std::vector<AxisRule>& axes, const GridSpec& g) {
    PushforwardSpec spec;
    spec.main = &p;
    const auto reach = lattice_reach(g);
    return pushforward(spec, axes, g.dx, -reach, reach);
}

std::pair<LatticeMeasure, LatticeMeasure> eta_kernel_pair(const Polynomial& p, const Polynomial& comparison,
                                                          const GridSpec& g, const NodePolicy& policy) {
    auto axes = eta_axes({&p, &comparison}, g, policy);
    return {eta_pushforward(p, axes, g), eta_pushforward(comparison, axes, g)};
}

LatticeMeasure eta_kernel(const Polynomial& p, const Polynomial* comparison, const GridSpec& g,
                          const NodePolicy& policy) {
    auto axes = eta_axes({&p, comparison}, g, policy);
    PushforwardSpec spec;
    spec.main = &p;
    spec.comparison = comparison;
    const auto reach = lattice_reach(g);
    return pushforward(spec, axes, g.dx, -reach, reach);
}

std::vector<MaximalResult> maximal_continuous(const FunctionBatch& fs, const Polynomial& p, int h_grid_size,
                                              const NodePolicy& policy) {
    if (h_grid_size < 4) throw std::invalid_argument("h grid size must be at least 4");
    const GridSpec& g = common_grid(fs);
    ConvolutionBank bank(fs);
    std::vector<MaximalResult> out(fs.size(), empty_result(g, "h_half_exponent", h_grid_size, policy.min_nodes));
    std::vector<std::vector<double>> rows;
    const int n = p.dim();
    for_each_index(n, 2 * h_grid_size, [&](const IntVec& i) {
        std::vector<double> lo(n, 0.0), hi(n);
        for (int k = 0; k < n; ++k) hi[k] = std::exp2(-0.5 * static_cast<double>(i[k]));
        bank.apply(box_kernel(p, lo, hi, g, policy), rows);
        for (std::size_t f = 0; f < fs.size(); ++f) update(out[f], rows[f], i);
    });
    return out;
}

MaximalResult maximal_continuous(const GridFunction& f, const Polynomial& p, int h_grid_size,
                                 const NodePolicy& policy) {
    return maximal_continuous(FunctionBatch{&f}, p, h_grid_size, policy)[0];
}

std::vector<MaximalResult> maximal_dyadic(const FunctionBatch& fs, const Polynomial& p, int q_max, DyadicForm form,
                                          const NodePolicy& policy) {
    if (q_max < 1) throw std::invalid_argument("q_max must be at least 1");
    const GridSpec& g = common_grid(fs);
    ConvolutionBank bank(fs);
    std::vector<MaximalResult> out(fs.size(), empty_result(g, "q", q_max, policy.min_nodes));
    std::vector<std::vector<double>> rows;
    const int n = p.dim();
    for_each_index(n, q_max, [&](const IntVec& q) {
        LatticeMeasure k;
        if (form == DyadicForm::Box) {
            std::vector<double> lo(n), hi(n);
            for (int i = 0; i < n; ++i) {
                hi[i] = std::exp2(-static_cast<double>(q[i]));
                lo[i] = 0.5 * hi[i];
            }
            k = box_kernel(p, lo, hi, g, policy);
        } else {
            k = eta_kernel(p.dilate(q), nullptr, g, policy);
        }
        bank.apply(k, rows);
        for (std::size_t f = 0; f < fs.size(); ++f) update(out[f], rows[f], q);
    });
    return out;
}

MaximalResult maximal_dyadic(const GridFunction& f, const Polynomial& p, int q_max, DyadicForm form,
                             const NodePolicy& policy) {
    return maximal_dyadic(FunctionBatch{&f}, p, q_max, form, policy)[0];
}

MaximalResult hardy_littlewood(const GridFunction& f) {
    const std::size_t n = f.size();
    MaximalResult r = empty_result(f.grid(), "interval", 0, 0);
    std::vector<long double> prefix(n + 1, 0.0L);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + f[i];
    std::vector<std::int64_t> best_a(n, 0), best_b(n, static_cast<std::int64_t>(n) - 1);
    for (std::size_t a = 0; a < n; ++a) {
        double suffix = -1.0;
        std::size_t suffix_b = n - 1;
        for (std::size_t b = n; b-- > a;) {
            auto avg = static_cast<double>((prefix[b + 1] - prefix[a]) / static_cast<long double>(b - a + 1));
            if (avg > suffix) {
                suffix = avg;
                suffix_b = b;
            }
            if (suffix > r.values[b]) {
                r.values[b] = suffix;
                best_a[b] = static_cast<std::int64_t>(a);
                best_b[b] = static_cast<std::int64_t>(suffix_b);
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) r.argmax[i] = {best_a[i], best_b[i]};
    return r;
}

DominationReport domination_report(const MaximalResult& op, const MaximalResult& hl, double rel_tol) {
    DominationReport rep;
    rep.tolerance = rel_tol;
    const double floor = 1e-12 * std::max(hl.sup(), op.sup());
    for (std::size_t i = 0; i < op.values.size(); ++i) {
        double m = op.values[i], h = hl.values[i];
        rep.max_excess = std::max(rep.max_excess, m - 2 * h);
        if (h > floor) rep.max_ratio = std::max(rep.max_ratio, m / h);
        if (m > 2 * h * (1 + rel_tol) + floor) ++rep.violations;
    }
    rep.passed = rep.violations == 0;
    return rep;
}

DominationReport monomial_domination_check(const GridFunction& f, const Polynomial& p, int h_grid_size,
                                           double rel_tol, const NodePolicy& policy) {
    if (p.terms().size() != 1 || !(p.terms()[0].coeff > 0))
        throw std::invalid_argument("domination check needs a monomial with positive coefficient");
    return domination_report(maximal_continuous(f, p, h_grid_size, policy), hardy_littlewood(f), rel_tol);
}

Polynomial restrict_variables(const Polynomial& p, const std::vector<int>& keep) {
    std::map<Exponent, double> terms;
    for (const auto& t : p.terms()) {
        Exponent e;
        for (int i : keep) e.push_back(t.exponent[i]);
        int dropped = 0;
        for (int x : t.exponent) dropped += x;
        for (int x : e) dropped -= x;
        if (dropped != 0) throw std::invalid_argument("polynomial depends on a dropped variable");
        terms[e] += t.coeff;
    }
    return Polynomial(static_cast<int>(keep.size()), terms);
}

namespace {

Polynomial vertex_monomial(const Polynomial& p, const Exponent& v) { return Polynomial(p.dim(), {{v, p.coeff(v)}}); }

Polynomial zero_part(const Polynomial& p, const VertexData& v) {
    return lambda0_split(p, v.vertex, v.zero_coords).lambda0;
}

IntVec project(const IntVec& q, const std::vector<int>& coords) {
    IntVec r;
    for (int i : coords) r.push_back(q[i]);
    return r;
}

// Kernel of the zero-coordinate part with the dropped variables integrated out exactly.
class ReducedZeroPart {
public:
    ReducedZeroPart(const Polynomial& p, const VertexData& v, const GridSpec& g, const NodePolicy& policy)
        : v_(v), g_(g), policy_(policy), factor_(std::pow(EtaWindow::integral(), static_cast<double>(v.zero_coords.size()))) {
        Polynomial z = zero_part(p, v);
        if (!v.nonzero_coords.empty()) reduced_.emplace(restrict_variables(z, v.nonzero_coords));
        else constant_ = z.coeff(Exponent(p.dim(), 0));
    }

    // Own node choice, cached by the nonzero coordinates of q.
    const LatticeMeasure& kernel(const IntVec& q) {
        IntVec key = project(q, v_.nonzero_coords);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
        std::vector<AxisRule> axes;
        if (reduced_) {
            Polynomial scaled = reduced_->dilate(key);
            axes = eta_axes({&scaled}, g_, policy_);
        }
        return cache_.emplace(key, build(key, axes)).first->second;
    }

    // Reuses the rules of the nonzero coordinates from a full tensor rule.
    LatticeMeasure kernel(const IntVec& q, const std::vector<AxisRule>& full_axes) const {
        std::vector<AxisRule> axes;
        for (int i : v_.nonzero_coords) axes.push_back(full_axes[i]);
        return build(project(q, v_.nonzero_coords), axes);
    }

private:
    LatticeMeasure build(const IntVec& key, const std::vector<AxisRule>& axes) const {
        LatticeMeasure k;
        if (reduced_) {
            k = eta_pushforward(reduced_->dilate(key), axes, g_);
        } else {
            const auto reach = lattice_reach(g_);
            LatticeDeposit dep(g_.dx, -reach, reach);
            dep.add_point(constant_, 1.0);
            k = dep.finish();
        }
        for (auto& w : k.w) w *= factor_;
        return k;
    }

    const VertexData& v_;
    GridSpec g_;
    NodePolicy policy_;
    double factor_;
    std::optional<Polynomial> reduced_;
    double constant_ = 0.0;
    std::map<IntVec, LatticeMeasure> cache_;
};

}  // namespace

std::vector<std::vector<ConeRestrictedResult>> maximal_cone_restricted_all(const FunctionBatch& fs,
                                                                           const Polynomial& p,
                                                                           const NewtonDiagram& d, int q_max,
                                                                           const NodePolicy& policy) {
    if (q_max < 1) throw std::invalid_argument("q_max must be at least 1");
    const GridSpec& g = common_grid(fs);
    const std::size_t r = d.vertices.size();
    std::vector<std::vector<ConeRestrictedResult>> out(fs.size(), std::vector<ConeRestrictedResult>(r));
    std::vector<Polynomial> comparisons;
    std::vector<std::unique_ptr<ReducedZeroPart>> reduced(r);
    for (std::size_t j = 0; j < r; ++j) {
        const auto& v = d.vertices[j];
        comparisons.push_back(v.has_zero_coords() ? zero_part(p, v) : vertex_monomial(p, v.vertex));
        if (v.has_zero_coords()) reduced[j] = std::make_unique<ReducedZeroPart>(p, v, g, policy);
        for (auto& row : out) {
            row[j].vertex = j;
            row[j].zero_coordinates = v.has_zero_coords();
            row[j].restricted = empty_result(g, "q", q_max, policy.min_nodes);
            row[j].comparison = row[j].restricted;
            row[j].remainder = row[j].restricted;
        }
    }
    ConvolutionBank bank(fs);
    std::vector<std::vector<double>> main_rows, comp_rows, reduced_rows;
    for_each_index(p.dim(), q_max, [&](const IntVec& q) {
        const std::size_t j = decompose_index(d, q).j;
        Polynomial scaled = p.dilate(q);
        Polynomial comp = comparisons[j].dilate(q);
        auto axes = eta_axes({&scaled, &comp}, g, policy);
        bank.apply(eta_pushforward(scaled, axes, g), main_rows);
        bank.apply(eta_pushforward(comp, axes, g), comp_rows);
        if (reduced[j]) bank.apply(reduced[j]->kernel(q, axes), reduced_rows);
        for (std::size_t f = 0; f < fs.size(); ++f) {
            auto& res = out[f][j];
            ++res.indices;
            update(res.restricted, main_rows[f], q);
            update(res.comparison, reduced[j] ? reduced_rows[f] : comp_rows[f], q);
            for (std::size_t i = 0; i < main_rows[f].size(); ++i) comp_rows[f][i] = main_rows[f][i] - comp_rows[f][i];
            update(res.remainder, comp_rows[f], q, true);
        }
    });
    return out;
}

ConeRestrictedResult maximal_cone_restricted(const GridFunction& f, const Polynomial& p, const NewtonDiagram& d,
                                             std::size_t j, int q_max, const NodePolicy& policy) {
    if (j >= d.vertices.size()) throw std::out_of_range("invalid vertex index");
    return maximal_cone_restricted_all(FunctionBatch{&f}, p, d, q_max, policy)[0][j];
}

MaximalResult zero_part_reduced(const GridFunction& f, const Polynomial& p, const NewtonDiagram& d, std::size_t j,
                                int q_max, const NodePolicy& policy) {
    if (j >= d.vertices.size()) throw std::out_of_range("invalid vertex index");
    const auto& v = d.vertices[j];
    if (!v.has_zero_coords()) throw std::invalid_argument("vertex has no zero coordinates");
    ReducedZeroPart reduced(p, v, f.grid(), policy);
    ConvolutionBank bank({&f});
    MaximalResult out = empty_result(f.grid(), "q", q_max, policy.min_nodes);
    std::vector<std::vector<double>> rows;
    for_each_index(p.dim(), q_max, [&](const IntVec& q) {
        if (decompose_index(d, q).j != j) return;
        bank.apply(reduced.kernel(q), rows);
        update(out, rows[0], q);
    });
    return out;
}

MaximalResult zero_part_direct(const GridFunction& f, const Polynomial& p, const NewtonDiagram& d, std::size_t j,
                               int q_max, const NodePolicy& policy) {
    if (j >= d.vertices.size()) throw std::out_of_range("invalid vertex index");
    const auto& v = d.vertices[j];
    if (!v.has_zero_coords()) throw std::invalid_argument("vertex has no zero coordinates");
    Polynomial z = zero_part(p, v);
    ConvolutionBank bank({&f});
    MaximalResult out = empty_result(f.grid(), "q", q_max, policy.min_nodes);
    std::vector<std::vector<double>> rows;
    for_each_index(p.dim(), q_max, [&](const IntVec& q) {
        if (decompose_index(d, q).j != j) return;
        bank.apply(eta_kernel(z.dilate(q), nullptr, f.grid(), policy), rows);
        update(out, rows[0], q);
    });
    return out;
}

}  // namespace polymax
