#include "polymax/newton.hpp"

#include <algorithm>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include "polymax/lattice.hpp"

namespace polymax {

using lattice::dot;
using lattice::Matrix;

std::vector<int> VertexData::b_normals() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(normals.size()); ++i)
        if (std::find(axis_normals.begin(), axis_normals.end(), i) == axis_normals.end()) out.push_back(i);
    return out;
}

std::string rational_string(const Rational& r) {
    if (r.denominator() == 1) return std::to_string(r.numerator());
    return std::to_string(r.numerator()) + "/" + std::to_string(r.denominator());
}

double to_double(const Rational& r) { return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator()); }

namespace {

IntVec diff(const Exponent& a, const Exponent& b) {
    IntVec d(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) d[i] = a[i] - b[i];
    return d;
}

// Sign-normalise so the first nonzero entry is positive.
IntVec canonical_direction(IntVec v) {
    v = lattice::primitive(v);
    for (auto x : v) {
        if (x == 0) continue;
        if (x < 0)
            for (auto& y : v) y = -y;
        break;
    }
    return v;
}

void combinations(int n, int k, const std::function<void(const std::vector<int>&)>& fn) {
    std::vector<int> idx(k);
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == k) {
            fn(idx);
            return;
        }
        for (int i = start; i < n; ++i) {
            idx[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
}

std::vector<IntVec> facet_normals(int n, const std::vector<Exponent>& pts) {
    std::set<IntVec> dirs;
    for (std::size_t a = 0; a < pts.size(); ++a)
        for (std::size_t b = a + 1; b < pts.size(); ++b) dirs.insert(canonical_direction(diff(pts[a], pts[b])));
    for (int i = 0; i < n; ++i) dirs.insert(lattice::unit(n, i));
    std::vector<IntVec> D(dirs.begin(), dirs.end());

    std::set<IntVec> found;
    combinations(static_cast<int>(D.size()), n - 1, [&](const std::vector<int>& idx) {
        Matrix rows;
        for (int i : idx) rows.push_back(D[i]);
        IntVec w = lattice::primitive(lattice::cross(rows));
        if (std::all_of(w.begin(), w.end(), [](auto x) { return x == 0; })) return;
        bool neg = std::any_of(w.begin(), w.end(), [](auto x) { return x < 0; });
        bool pos = std::any_of(w.begin(), w.end(), [](auto x) { return x > 0; });
        if (neg && pos) return;
        if (neg)
            for (auto& x : w) x = -x;
        if (found.count(w)) return;
        std::int64_t c = std::numeric_limits<std::int64_t>::max();
        for (const auto& u : pts) c = std::min(c, dot(w, u));
        Matrix span;
        const Exponent* base = nullptr;
        for (const auto& u : pts) {
            if (dot(w, u) != c) continue;
            if (!base)
                base = &u;
            else
                span.push_back(diff(u, *base));
        }
        for (int i = 0; i < n; ++i)
            if (w[i] == 0) span.push_back(lattice::unit(n, i));
        if (lattice::rank(span) == n - 1) found.insert(w);
    });
    return {found.begin(), found.end()};
}

void sort_normals(std::vector<IntVec>& normals) {
    const std::size_t n = normals.empty() ? 0 : normals[0].size();
    if (n == 2) {
        std::sort(normals.begin(), normals.end(),
                  [](const IntVec& a, const IntVec& b) { return a[0] * b[1] - a[1] * b[0] > 0; });
    } else {
        std::sort(normals.begin(), normals.end(), std::greater<IntVec>());
    }
}

// Placing triangulation of a full-dimensional pointed cone.
std::vector<std::vector<IntVec>> triangulate_cone(int n, std::vector<IntVec> gens) {
    std::stable_sort(gens.begin(), gens.end(), [](const IntVec& a, const IntVec& b) {
        auto axis = [](const IntVec& v) { return std::count(v.begin(), v.end(), 0) == static_cast<long>(v.size()) - 1; };
        return axis(a) && !axis(b);
    });
    std::vector<int> first;
    Matrix chosen;
    for (int i = 0; i < static_cast<int>(gens.size()) && static_cast<int>(first.size()) < n; ++i) {
        Matrix trial = chosen;
        trial.push_back(gens[i]);
        if (lattice::rank(trial) == static_cast<int>(trial.size())) {
            chosen = trial;
            first.push_back(i);
        }
    }
    if (static_cast<int>(first.size()) < n) throw std::logic_error("normal cone is not full-dimensional");
    std::vector<std::vector<int>> simplices{first};
    for (int g = 0; g < static_cast<int>(gens.size()); ++g) {
        if (std::find(first.begin(), first.end(), g) != first.end()) continue;
        std::map<std::vector<int>, std::pair<int, int>> faces;  // face -> (count, opposite generator)
        for (const auto& s : simplices)
            for (int drop = 0; drop < n; ++drop) {
                std::vector<int> f;
                for (int k = 0; k < n; ++k)
                    if (k != drop) f.push_back(s[k]);
                std::sort(f.begin(), f.end());
                auto& e = faces[f];
                e.first++;
                e.second = s[drop];
            }
        std::vector<std::vector<int>> added;
        for (const auto& [f, info] : faces) {
            if (info.first != 1) continue;
            Matrix rows;
            for (int k : f) rows.push_back(gens[k]);
            IntVec y = lattice::cross(rows);
            if (dot(y, gens[info.second]) < 0)
                for (auto& x : y) x = -x;
            if (dot(y, gens[g]) < 0) {
                auto s = f;
                s.push_back(g);
                added.push_back(s);
            }
        }
        for (auto& s : added) simplices.push_back(s);
    }
    std::vector<std::vector<IntVec>> out;
    for (const auto& s : simplices) {
        std::vector<IntVec> cone;
        for (int k : s) cone.push_back(gens[k]);
        out.push_back(cone);
    }
    return out;
}

std::vector<Rational> gamma_values(const VertexData& v, const std::vector<Exponent>& support, bool& empty) {
    std::vector<Rational> g;
    empty = true;
    std::vector<std::int64_t> mins(v.zero_coords.size(), std::numeric_limits<std::int64_t>::max());
    for (const auto& u : support) {
        bool in0 = std::all_of(v.zero_coords.begin(), v.zero_coords.end(), [&](int i) { return u[i] == 0; });
        if (in0) continue;
        empty = false;
        for (std::size_t k = 0; k < v.zero_coords.size(); ++k) mins[k] = std::min<std::int64_t>(mins[k], u[v.zero_coords[k]]);
    }
    if (empty) return g;
    for (auto m : mins) g.emplace_back(m, v.d);
    return g;
}

void fill_vertex(VertexData& v, const std::vector<Exponent>& support) {
    const int n = v.dim();
    sort_normals(v.normals);
    Matrix cols = v.normals;
    std::int64_t det = 0;
    v.coord_rows.assign(n, IntVec(n));
    for (int k = 0; k < n; ++k) {
        IntVec num = lattice::cramer_numerators(cols, lattice::unit(n, k), det);
        for (int i = 0; i < n; ++i) v.coord_rows[i][k] = num[i];
    }
    if (det == 0) throw std::logic_error("singular normal matrix at " + exponent_string(v.vertex));
    v.d = det < 0 ? -det : det;
    if (det < 0)
        for (auto& r : v.coord_rows)
            for (auto& x : r) x = -x;
    v.zero_coords.clear();
    v.nonzero_coords.clear();
    v.axis_normals.clear();
    for (int i = 0; i < n; ++i) (v.vertex[i] == 0 ? v.zero_coords : v.nonzero_coords).push_back(i);
    for (int i : v.zero_coords) {
        IntVec e = lattice::unit(n, i);
        auto it = std::find(v.normals.begin(), v.normals.end(), e);
        v.axis_normals.push_back(it == v.normals.end() ? -1 : static_cast<int>(it - v.normals.begin()));
    }
    v.beta = beta_constant(v, support);
    v.gamma.clear();
    v.gamma_infinite = false;
    if (!v.zero_coords.empty()) v.gamma = gamma_values(v, support, v.gamma_infinite);
}

}  // namespace

NewtonDiagram build_diagram(const Polynomial& p) {
    NewtonDiagram d;
    d.n = p.dim();
    if (d.n > 4) throw std::invalid_argument("exact diagram machinery supports n <= 4");
    d.support = p.support();
    std::sort(d.support.begin(), d.support.end());
    d.facets = facet_normals(d.n, d.support);

    for (const auto& u : d.support) {
        std::vector<IntVec> tight;
        for (const auto& w : d.facets) {
            std::int64_t c = std::numeric_limits<std::int64_t>::max();
            for (const auto& x : d.support) c = std::min(c, dot(w, x));
            if (dot(w, u) == c) tight.push_back(w);
        }
        if (lattice::rank(tight) < d.n) continue;
        IntVec witness(d.n, 0);
        for (const auto& w : tight)
            for (int i = 0; i < d.n; ++i) witness[i] += w[i];
        for (auto x : witness)
            if (x <= 0) throw std::logic_error("corner witness not strictly positive");
        for (const auto& x : d.support)
            if (x != u && dot(witness, x) <= dot(witness, u)) throw std::logic_error("corner witness not separating");
        std::size_t corner = d.corners.size();
        d.corners.push_back(u);
        std::vector<std::vector<IntVec>> cones;
        bool degenerate = static_cast<int>(tight.size()) > d.n;
        if (degenerate)
            cones = triangulate_cone(d.n, tight);
        else
            cones.push_back(tight);
        for (auto& cone : cones) {
            VertexData v;
            v.vertex = u;
            v.corner = corner;
            v.normals = cone;
            v.witness = witness;
            v.degenerate = degenerate;
            fill_vertex(v, d.support);
            d.vertices.push_back(std::move(v));
        }
    }
    if (d.vertices.empty()) throw std::logic_error("no corner points found");
    return d;
}

std::optional<IntVec> cone_numerators(const VertexData& v, const IntVec& q) {
    IntVec num(v.coord_rows.size());
    for (std::size_t i = 0; i < num.size(); ++i) {
        num[i] = dot(v.coord_rows[i], q);
        if (num[i] < 0) return std::nullopt;
    }
    return num;
}

IntVec reconstruct(const VertexData& v, const IndexDecomposition& dec) {
    const int n = v.dim();
    IntVec acc(n, 0);
    int k = 0;
    for (int i = 0; i < n; ++i) {
        std::int64_t c = dec.N + (i == dec.m ? 0 : dec.kbar[k++]);
        for (int r = 0; r < n; ++r) acc[r] += c * v.normals[i][r];
    }
    for (auto& x : acc) {
        if (x % v.d != 0) throw std::logic_error("reconstruction is not integral");
        x /= v.d;
    }
    return acc;
}

namespace {

IndexDecomposition make_decomposition(std::size_t j, const VertexData& v, const IntVec& num) {
    IndexDecomposition dec;
    dec.j = j;
    dec.d = v.d;
    dec.numerators = num;
    auto it = std::min_element(num.begin(), num.end());
    dec.m = static_cast<int>(it - num.begin());
    dec.N = *it;
    for (int i = 0; i < static_cast<int>(num.size()); ++i)
        if (i != dec.m) dec.kbar.push_back(num[i] - dec.N);
    return dec;
}

}  // namespace

IndexDecomposition decompose_index(const NewtonDiagram& d, const IntVec& q) {
    if (static_cast<int>(q.size()) != d.n) throw std::invalid_argument("index has wrong dimension");
    for (auto x : q)
        if (x < 0) throw std::invalid_argument("index must be nonnegative");
    for (std::size_t j = 0; j < d.vertices.size(); ++j)
        if (auto num = cone_numerators(d.vertices[j], q)) return make_decomposition(j, d.vertices[j], *num);
    throw std::logic_error("index not covered by any cone: diagram construction bug");
}

std::vector<IndexDecomposition> all_decompositions(const NewtonDiagram& d, const IntVec& q) {
    std::vector<IndexDecomposition> out;
    for (std::size_t j = 0; j < d.vertices.size(); ++j)
        if (auto num = cone_numerators(d.vertices[j], q)) out.push_back(make_decomposition(j, d.vertices[j], *num));
    return out;
}

std::optional<IntVec> slice_index(const VertexData& v, std::int64_t N, int m, const IntVec& kbar) {
    const int n = v.dim();
    if (m < 0 || m >= n || static_cast<int>(kbar.size()) != n - 1) throw std::invalid_argument("bad slot or offsets");
    IndexDecomposition dec;
    dec.N = N;
    dec.m = m;
    dec.kbar = kbar;
    dec.d = v.d;
    IntVec acc(n, 0);
    int k = 0;
    for (int i = 0; i < n; ++i) {
        std::int64_t c = N + (i == m ? 0 : kbar[k++]);
        for (int r = 0; r < n; ++r) acc[r] += c * v.normals[i][r];
    }
    for (auto& x : acc) {
        if (x % v.d != 0) return std::nullopt;
        x /= v.d;
    }
    return acc;
}

std::optional<IntVec> zero_coordinate_index(const VertexData& v, const IntVec& kbar, const IntVec& lbar) {
    const int n = v.dim();
    auto bn = v.b_normals();
    if (kbar.size() != v.zero_coords.size() || lbar.size() != bn.size())
        throw std::invalid_argument("offset vectors have wrong length");
    IntVec acc(n, 0);
    for (std::size_t i = 0; i < v.zero_coords.size(); ++i) acc[v.zero_coords[i]] += kbar[i];
    for (std::size_t b = 0; b < bn.size(); ++b)
        for (int r = 0; r < n; ++r) acc[r] += lbar[b] * v.normals[bn[b]][r];
    for (auto& x : acc) {
        if (x % v.d != 0) return std::nullopt;
        x /= v.d;
    }
    return acc;
}

bool in_T(const NewtonDiagram& d, std::size_t corner, const IntVec& q) {
    const Exponent& vj = d.corners[corner];
    for (const auto& u : d.support) {
        if (u == vj) continue;
        if (dot(q, diff(u, vj)) <= 0) return false;
    }
    return true;
}

std::optional<Rational> beta_constant(const VertexData& v, const std::vector<Exponent>& support) {
    IntVec sum(v.dim(), 0);
    for (const auto& nv : v.normals)
        for (int i = 0; i < v.dim(); ++i) sum[i] += nv[i];
    std::optional<std::int64_t> best;
    for (const auto& u : support) {
        if (u == v.vertex) continue;
        std::int64_t x = dot(sum, diff(u, v.vertex));
        if (!best || x < *best) best = x;
    }
    if (!best) return std::nullopt;
    if (*best <= 0) throw std::logic_error("nonpositive beta at " + exponent_string(v.vertex));
    return Rational(*best, v.d);
}

std::optional<std::vector<Rational>> gamma_constant(const VertexData& v, const std::vector<Exponent>& support) {
    if (v.zero_coords.empty()) throw std::invalid_argument("vertex has no zero coordinates");
    bool empty = false;
    auto g = gamma_values(v, support, empty);
    if (empty) return std::nullopt;
    for (const auto& x : g)
        if (x <= 0) throw std::logic_error("nonpositive gamma component at " + exponent_string(v.vertex));
    return g;
}

std::optional<Rational> diagonal_gamma(const VertexData& v, const std::vector<Exponent>& support) {
    std::optional<std::int64_t> best;
    for (const auto& u : support) {
        std::int64_t s = 0;
        for (int i : v.zero_coords) s += u[i];
        if (s == 0) continue;
        if (!best || s < *best) best = s;
    }
    if (!best) return std::nullopt;
    return Rational(*best, v.d);
}

ScalingConstants scaling_constants(const VertexData& v) {
    ScalingConstants sc;
    const int n = v.dim();
    std::vector<Rational> per(n);
    std::int64_t total = 0;
    for (int i = 0; i < n; ++i) {
        std::int64_t x = dot(v.normals[i], v.vertex);
        per[i] = Rational(x, v.d);
        total += x;
    }
    sc.cN_exponent = Rational(total, v.d);
    for (int m = 0; m < n; ++m) {
        std::vector<Rational> s;
        for (int i = 0; i < n; ++i)
            if (i != m) s.push_back(per[i]);
        sc.sigma_slot.push_back(s);
    }
    if (!v.zero_coords.empty())
        for (int b : v.b_normals()) sc.sigma_zero.push_back(per[b]);
    return sc;
}

PartitionReport verify_partition(const NewtonDiagram& d, std::int64_t q_max) {
    if (q_max < 1) throw std::invalid_argument("q_max must be >= 1");
    PartitionReport rep;
    rep.q_max = q_max;
    const int n = d.n;
    auto note = [&](const std::string& s) {
        if (rep.messages.size() < 50) rep.messages.push_back(s);
    };
    auto qstr = [](const IntVec& q) {
        std::string s = "(";
        for (std::size_t i = 0; i < q.size(); ++i) s += (i ? "," : "") + std::to_string(q[i]);
        return s + ")";
    };
    IntVec q(n, 0);
    while (true) {
        ++rep.checked;
        auto decs = all_decompositions(d, q);
        if (decs.empty()) {
            ++rep.coverage_violations;
            note("uncovered index " + qstr(q));
        }
        int owners = 0;
        for (std::size_t c = 0; c < d.corners.size(); ++c) {
            if (!in_T(d, c, q)) continue;
            ++owners;
            bool inside = std::any_of(decs.begin(), decs.end(), [&](const auto& x) { return d.vertices[x.j].corner == c; });
            if (!inside) {
                ++rep.coverage_violations;
                note("index " + qstr(q) + " in T but outside S for corner " + std::to_string(c));
            }
        }
        if (owners > 1) {
            ++rep.disjointness_violations;
            note("index " + qstr(q) + " lies in " + std::to_string(owners) + " sets T(j)");
        }
        for (const auto& dec : decs) {
            const auto& v = d.vertices[dec.j];
            IntVec back = reconstruct(v, dec);
            if (back != q) {
                ++rep.reconstruction_violations;
                note("reconstruction mismatch at " + qstr(q));
            }
            if (!v.beta) continue;
            Rational bound = *v.beta * Rational(dec.N, v.d);
            for (const auto& u : d.support) {
                if (u == v.vertex) continue;
                if (Rational(dot(q, diff(u, v.vertex))) < bound) {
                    ++rep.lemma_violations;
                    note("lower bound fails at " + qstr(q) + " vertex " + exponent_string(v.vertex));
                }
            }
        }
        int i = 0;
        while (i < n && q[i] == q_max) q[i++] = 0;
        if (i == n) break;
        ++q[i];
    }
    return rep;
}

nlohmann::json to_json(const NewtonDiagram& d) {
    using nlohmann::json;
    json out;
    out["dimension"] = d.n;
    out["support"] = d.support;
    json vs = json::array();
    for (const auto& v : d.vertices) {
        json j;
        j["vertex"] = v.vertex;
        j["corner"] = v.corner;
        j["normals"] = v.normals;
        j["d"] = v.d;
        j["beta"] = v.beta ? json(rational_string(*v.beta)) : json("inf");
        j["zero_coords"] = v.zero_coords;
        j["nonzero_coords"] = v.nonzero_coords;
        j["degenerate"] = v.degenerate;
        j["witness"] = v.witness;
        if (!v.zero_coords.empty()) {
            if (v.gamma_infinite) {
                j["gamma"] = "inf";
            } else {
                json g = json::array();
                for (const auto& x : v.gamma) g.push_back(rational_string(x));
                j["gamma"] = g;
            }
        }
        auto sc = scaling_constants(v);
        j["cN_exponent"] = rational_string(sc.cN_exponent);
        vs.push_back(j);
    }
    out["vertices"] = vs;
    return out;
}

}  // namespace polymax
