#include "polymax/weak_type.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <ostream>
#include <random>
#include <stdexcept>
#include <tuple>

#include "polymax/convolution.hpp"

namespace polymax {

std::string kind_name(TestKind k) {
    switch (k) {
        case TestKind::Indicator: return "indicator";
        case TestKind::BumpSum: return "bump-sum";
        case TestKind::DeltaLike: return "delta-like";
    }
    return "indicator";
}

TestFunction indicator_function(const GridSpec& g, double a, double b) {
    if (!(b > a)) throw std::invalid_argument("indicator needs a < b");
    TestFunction t;
    t.kind = TestKind::Indicator;
    t.parts = {{0.5 * (a + b), b - a, 1.0}};
    t.f = GridFunction::indicator(g, a, b);
    t.mass = t.f.mass();
    return t;
}

TestFunction bump_sum(const GridSpec& g, const std::vector<Bump>& bumps) {
    if (bumps.empty()) throw std::invalid_argument("bump sum needs at least one bump");
    std::vector<double> v(g.cells, 0.0);
    for (const auto& b : bumps) {
        if (!(b.width > 0) || !(b.height > 0)) throw std::invalid_argument("bumps need positive width and height");
        for (std::size_t i = 0; i < g.cells; ++i) {
            double u = (g.x(i) - b.center) / b.width;
            if (std::abs(u) < 0.5) {
                double c = std::cos(std::numbers::pi * u);
                v[i] += b.height * c * c;
            }
        }
    }
    TestFunction t;
    t.kind = TestKind::BumpSum;
    t.parts = bumps;
    t.f = GridFunction(g, std::move(v));
    t.mass = t.f.mass();
    if (!(t.mass > 0)) throw std::invalid_argument("bumps fall between grid points");
    return t;
}

TestFunction delta_like(const GridSpec& g, double center, double width, double mass) {
    const double cells = width / g.dx;
    const auto k = static_cast<long>(std::llround(cells));
    if (k < 2 || std::abs(cells - static_cast<double>(k)) > 1e-9) throw std::invalid_argument("width must be a multiple of dx, at least 2 dx");
    if (!(mass > 0)) throw std::invalid_argument("mass must be positive");
    const long first = static_cast<long>(std::floor((center - g.x_lo) / g.dx)) - k / 2;
    if (first < 0 || first + k > static_cast<long>(g.cells)) throw std::invalid_argument("delta-like function leaves the grid");
    std::vector<double> v(g.cells, 0.0);
    const double h = mass / (static_cast<double>(k) * g.dx);
    for (long i = first; i < first + k; ++i) v[static_cast<std::size_t>(i)] = h;
    TestFunction t;
    t.kind = TestKind::DeltaLike;
    t.parts = {{g.x_lo + (static_cast<double>(first) + 0.5 * static_cast<double>(k)) * g.dx, static_cast<double>(k) * g.dx, h}};
    t.f = GridFunction(g, std::move(v), mass);
    t.mass = t.f.mass();
    return t;
}

std::vector<TestFunction> standard_corpus(const GridSpec& g, std::uint64_t seed, int count) {
    if (count < 1) throw std::invalid_argument("corpus needs at least one function");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> start(-5.0, -1.0), length(0.1, 1.0), center(-4.5, -0.5), width(0.05, 1.0),
        height(0.1, 10.0), unit(0.0, 1.0);
    std::vector<TestFunction> out;
    for (int i = 0; i < count; ++i) {
        const int slot = i % 4;
        TestFunction t;
        if (slot == 0) {
            double a = start(rng);
            t = indicator_function(g, a, a + length(rng));
        } else if (slot == 3) {
            int k = 2 << static_cast<int>(unit(rng) * 5.0);
            t = delta_like(g, center(rng), k * g.dx, 0.1 + 9.9 * unit(rng));
        } else {
            int bumps = 1 + static_cast<int>(unit(rng) * 5.0);
            std::vector<Bump> b;
            for (int j = 0; j < bumps; ++j) b.push_back({center(rng), width(rng), height(rng)});
            t = bump_sum(g, b);
        }
        t.name = kind_name(t.kind) + "-" + std::to_string(i);
        out.push_back(std::move(t));
    }
    return out;
}

TestFunction scaled(const TestFunction& t, double c) {
    if (!(c > 0)) throw std::invalid_argument("scale must be positive");
    TestFunction s = t;
    for (auto& b : s.parts) b.height *= c;
    s.f = t.f.scaled(c);
    s.mass = t.mass * c;
    return s;
}

TestFunction translated(const TestFunction& t, long cells) {
    TestFunction s = t;
    for (auto& b : s.parts) b.center += static_cast<double>(cells) * t.f.grid().dx;
    s.f = t.f.shifted(cells);
    double kept = s.f.sample_mass(), before = t.f.sample_mass();
    if (std::abs(kept - before) > 1e-12 * before) throw std::invalid_argument("translation moves mass off the grid");
    return s;
}

std::vector<double> alpha_grid(double sup, const AlphaSpec& spec) {
    if (spec.points < 2 || !(spec.lo > 0) || !(spec.hi > spec.lo)) throw std::invalid_argument("bad alpha grid");
    if (!(sup > 0)) return {};
    std::vector<double> a;
    for (int i = 0; i < spec.points; ++i)
        a.push_back(sup * spec.lo * std::pow(spec.hi / spec.lo, static_cast<double>(i) / (spec.points - 1)));
    return a;
}

DistributionCurve distribution_function(const GridSpec& g, const std::vector<double>& values,
                                        const std::vector<double>& alpha) {
    for (std::size_t i = 0; i < alpha.size(); ++i)
        if (!(alpha[i] > 0) || (i > 0 && !(alpha[i] > alpha[i - 1]))) throw std::invalid_argument("alpha grid must be positive and increasing");
    std::vector<double> sorted(values);
    std::sort(sorted.begin(), sorted.end());
    DistributionCurve c;
    c.alpha = alpha;
    for (double a : alpha) {
        auto above = sorted.end() - std::upper_bound(sorted.begin(), sorted.end(), a);
        c.measure.push_back(static_cast<double>(above) * g.dx);
    }
    return c;
}

DistributionCurve distribution_function(const MaximalResult& r, const std::vector<double>& alpha) {
    return distribution_function(r.grid, r.values, alpha);
}

WeakValue weak_type_functional(const GridSpec& g, const std::vector<double>& values, double mass, const AlphaSpec& alpha) {
    if (!(mass > 0)) throw std::invalid_argument("mass must be positive");
    WeakValue w;
    w.mass = mass;
    double sup = 0.0;
    std::size_t support = 0;
    for (double v : values) {
        sup = std::max(sup, v);
        if (v > 0) ++support;
    }
    w.chebyshev = sup * static_cast<double>(support) * g.dx / mass;
    w.curve = distribution_function(g, values, alpha_grid(sup, alpha));
    for (std::size_t i = 0; i < w.curve.alpha.size(); ++i) {
        double x = w.curve.alpha[i] * w.curve.measure[i] / mass;
        if (x > w.W) {
            w.W = x;
            w.alpha_star = w.curve.alpha[i];
        }
    }
    return w;
}

WeakValue weak_type_functional(const MaximalResult& r, double mass, const AlphaSpec& alpha) {
    return weak_type_functional(r.grid, r.values, mass, alpha);
}

std::vector<VertexPieces> slice_pieces(const FunctionBatch& fs, const Polynomial& p, const NewtonDiagram& d,
                                       int q_max, const NodePolicy& policy) {
    if (fs.empty()) throw std::invalid_argument("no functions given");
    if (q_max < 1) throw std::invalid_argument("q_max must be at least 1");
    const GridSpec& g = fs[0]->grid();
    std::vector<Polynomial> comparisons;
    for (const auto& v : d.vertices)
        comparisons.push_back(v.has_zero_coords() ? lambda0_split(p, v.vertex, v.zero_coords).lambda0
                                                  : Polynomial(p.dim(), {{v.vertex, p.coeff(v.vertex)}}));
    using Key = std::tuple<std::size_t, int, std::int64_t>;
    std::map<Key, std::size_t> depth_slot, axis_slot;
    std::vector<VertexPieces> out(fs.size());
    for (auto& row : out) row.restricted.assign(d.vertices.size(), std::vector<double>(g.cells, 0.0));
    auto slot_of = [&](std::map<Key, std::size_t>& slots, std::vector<SlicePiece> VertexPieces::*list, const Key& key) {
        auto it = slots.find(key);
        if (it == slots.end()) {
            it = slots.emplace(key, (out[0].*list).size()).first;
            for (auto& row : out)
                (row.*list).push_back({std::get<0>(key), std::get<1>(key), std::get<2>(key), 0,
                                       std::vector<double>(g.cells, 0.0)});
        }
        return it->second;
    };
    ConvolutionBank bank(fs);
    std::vector<std::vector<double>> main_rows, comp_rows;
    std::vector<std::size_t> slots;
    for_each_index(p.dim(), q_max, [&](const IntVec& q) {
        auto dec = decompose_index(d, q);
        const auto& v = d.vertices[dec.j];
        slots.assign(1, slot_of(depth_slot, &VertexPieces::depth, {dec.j, -1, dec.N}));
        for (std::size_t i = 0; i < v.axis_normals.size(); ++i)
            if (v.axis_normals[i] >= 0) {
                std::int64_t k = dec.numerators[static_cast<std::size_t>(v.axis_normals[i])] / v.d;
                slots.push_back(slot_of(axis_slot, &VertexPieces::axis, {dec.j, static_cast<int>(i), k}));
            }
        Polynomial scaled = p.dilate(q);
        Polynomial comp = comparisons[dec.j].dilate(q);
        auto axes = eta_axes({&scaled, &comp}, g, policy);
        bank.apply(eta_pushforward(scaled, axes, g), main_rows);
        bank.apply(eta_pushforward(comp, axes, g), comp_rows);
        for (std::size_t f = 0; f < fs.size(); ++f) {
            auto& restricted = out[f].restricted[dec.j];
            for (std::size_t i = 0; i < g.cells; ++i) restricted[i] = std::max(restricted[i], std::abs(main_rows[f][i]));
            for (std::size_t s = 0; s < slots.size(); ++s) {
                auto& piece = s == 0 ? out[f].depth[slots[s]] : out[f].axis[slots[s]];
                ++piece.indices;
                for (std::size_t i = 0; i < g.cells; ++i)
                    piece.values[i] = std::max(piece.values[i], std::abs(main_rows[f][i] - comp_rows[f][i]));
            }
        }
    });
    auto order = [](const SlicePiece& a, const SlicePiece& b) {
        return std::tie(a.vertex, a.axis, a.N) < std::tie(b.vertex, b.axis, b.N);
    };
    for (auto& row : out) {
        std::sort(row.depth.begin(), row.depth.end(), order);
        std::sort(row.axis.begin(), row.axis.end(), order);
    }
    return out;
}

void fit_decay(SliceDecay& s) {
    std::vector<double> x, y;
    for (std::size_t i = 0; i < s.N.size(); ++i)
        if (s.W[i] > 0) {
            x.push_back(static_cast<double>(s.N[i]));
            y.push_back(std::log2(s.W[i]));
        }
    s.fitted = x.size() >= 3;
    if (s.fitted) {
        s.fit = fit_line(x, y);
        s.delta = -s.fit.slope;
        s.constant = std::exp2(s.fit.intercept);
    } else {
        s.fit = {};
        s.delta = 0.0;
        s.constant = 0.0;
    }
}

std::vector<SliceDecay> slice_decay(const std::vector<SlicePiece>& pieces, const GridSpec& g, double mass,
                                    const AlphaSpec& alpha) {
    std::vector<SliceDecay> out;
    for (const auto& piece : pieces) {
        if (out.empty() || out.back().vertex != piece.vertex || out.back().axis != piece.axis) {
            out.emplace_back();
            out.back().vertex = piece.vertex;
            out.back().axis = piece.axis;
            out.back().zero_coordinates = piece.axis >= 0;
        }
        auto& s = out.back();
        s.N.push_back(piece.N);
        s.W.push_back(weak_type_functional(g, piece.values, mass, alpha).W);
        s.indices.push_back(piece.indices);
    }
    for (auto& s : out) fit_decay(s);
    return out;
}

int default_q_max(int n) { return n <= 2 ? 16 : 10; }

namespace {

double relative_change(double a, double b) { return b == 0.0 ? (a == 0.0 ? 0.0 : HUGE_VAL) : std::abs(a / b - 1.0); }

bool all_decay(const std::vector<SliceDecay>& slices) {
    for (const auto& s : slices) {
        bool vanishes = std::all_of(s.W.begin(), s.W.end(), [](double w) { return w == 0.0; });
        if (!vanishes && !(s.fitted && s.delta > 0)) return false;
    }
    return true;
}

// Corpus maxima per group, in the group layout of the first function.
std::vector<SliceDecay> corpus_max(const std::vector<std::vector<SliceDecay>>& per_f) {
    std::vector<SliceDecay> out = per_f.front();
    for (std::size_t f = 1; f < per_f.size(); ++f)
        for (std::size_t j = 0; j < out.size(); ++j)
            for (std::size_t i = 0; i < out[j].W.size(); ++i) out[j].W[i] = std::max(out[j].W[i], per_f[f][j].W[i]);
    for (auto& s : out) fit_decay(s);
    return out;
}

}  // namespace

bool WeakTypeReport::depth_decay() const { return all_decay(slices); }
bool WeakTypeReport::axis_decay() const { return all_decay(axis_slices); }

void WeakTypeReport::write_slice_csv(std::ostream& os) const {
    os << "vertex,N,W,fit_delta\n";
    for (const auto& s : slices)
        for (std::size_t i = 0; i < s.N.size(); ++i) {
            os << s.vertex << ',' << s.N[i] << ',' << s.W[i] << ',';
            if (s.fitted) os << s.delta;
            os << '\n';
        }
}

WeakTypeReport stability_sweep(const Polynomial& p, const std::vector<TestFunction>& corpus, const SweepOptions& opts) {
    if (corpus.empty()) throw std::invalid_argument("corpus must be nonempty");
    const GridSpec& g = corpus[0].f.grid();
    WeakTypeReport rep;
    rep.polynomial = p.to_string();
    rep.q_max = opts.q_max > 0 ? opts.q_max : default_q_max(p.dim());

    std::vector<TestFunction> all(corpus);
    for (const auto& t : corpus) {
        for (double c : opts.scales) all.push_back(scaled(t, c));
        for (long s : opts.shifts) all.push_back(translated(t, s));
    }
    for (int k : opts.width_cells) all.push_back(delta_like(g, 0.5 * (g.x_lo + g.x_hi()) - 2.0, k * g.dx));
    FunctionBatch batch;
    for (const auto& t : all) batch.push_back(&t.f);
    auto results = maximal_continuous(batch, p, opts.h_grid, opts.policy);
    auto W = [&](std::size_t i) { return weak_type_functional(results[i], all[i].mass, opts.alpha).W; };

    const std::size_t per = opts.scales.size() + opts.shifts.size();
    std::vector<double> ws;
    for (std::size_t i = 0; i < corpus.size(); ++i) {
        CorpusEntry e;
        e.name = corpus[i].name;
        e.kind = corpus[i].kind;
        e.W = W(i);
        const std::size_t base = corpus.size() + i * per;
        for (std::size_t s = 0; s < opts.scales.size(); ++s) e.scale_deviation = std::max(e.scale_deviation, relative_change(W(base + s), e.W));
        for (std::size_t s = 0; s < opts.shifts.size(); ++s)
            e.translate_deviation = std::max(e.translate_deviation, relative_change(W(base + opts.scales.size() + s), e.W));
        rep.max_scale_deviation = std::max(rep.max_scale_deviation, e.scale_deviation);
        rep.max_translate_deviation = std::max(rep.max_translate_deviation, e.translate_deviation);
        ws.push_back(e.W);
        rep.corpus.push_back(e);
    }
    std::vector<double> sorted(ws);
    std::sort(sorted.begin(), sorted.end());
    rep.W_min = sorted.front();
    rep.W = sorted.back();
    const std::size_t mid = sorted.size() / 2;
    rep.W_median = sorted.size() % 2 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    for (double w : ws) rep.spread = std::max(rep.spread, relative_change(w, rep.W_median));
    const std::size_t half = (ws.size() + 1) / 2;
    rep.half_W_first = *std::max_element(ws.begin(), ws.begin() + static_cast<long>(half));
    rep.half_W_second = half < ws.size() ? *std::max_element(ws.begin() + static_cast<long>(half), ws.end()) : rep.half_W_first;
    rep.corpus_deviation = relative_change(rep.half_W_first, rep.half_W_second);

    const std::size_t wbase = corpus.size() * (1 + per);
    rep.width_cells = opts.width_cells;
    for (std::size_t k = 0; k < opts.width_cells.size(); ++k) rep.width_W.push_back(W(wbase + k));
    if (rep.width_W.size() >= 2) {
        // width_cells ascend, so shrinking width walks the list backwards
        bool rising = true;
        for (std::size_t k = 1; k < rep.width_W.size(); ++k) rising = rising && rep.width_W[k - 1] > rep.width_W[k];
        rep.width_blowup = rising && rep.width_W.front() > (1.0 + opts.stability) * rep.width_W.back();
    }

    auto d = build_diagram(p);
    FunctionBatch fs;
    for (const auto& t : corpus) fs.push_back(&t.f);
    auto pieces = slice_pieces(fs, p, d, rep.q_max, opts.policy);
    std::vector<std::vector<SliceDecay>> depth, axis;
    for (std::size_t f = 0; f < corpus.size(); ++f) {
        depth.push_back(slice_decay(pieces[f].depth, g, corpus[f].mass, opts.alpha));
        axis.push_back(slice_decay(pieces[f].axis, g, corpus[f].mass, opts.alpha));
    }
    rep.slices = corpus_max(depth);
    if (!axis.front().empty()) rep.axis_slices = corpus_max(axis);
    for (std::size_t j = 0; j < d.vertices.size(); ++j) {
        VertexWeak vw;
        vw.vertex = j;
        vw.zero_coordinates = d.vertices[j].has_zero_coords();
        for (std::size_t f = 0; f < corpus.size(); ++f)
            vw.W = std::max(vw.W, weak_type_functional(g, pieces[f].restricted[j], corpus[f].mass, opts.alpha).W);
        rep.vertices.push_back(vw);
    }
    return rep;
}

namespace {

nlohmann::json decay_json(const SliceDecay& s) {
    nlohmann::json x{{"vertex", s.vertex}, {"zero_coordinates", s.zero_coordinates}, {"N", s.N}, {"W", s.W},
                     {"indices", s.indices}, {"fitted", s.fitted}};
    if (s.axis >= 0) x["axis"] = s.axis;
    if (s.fitted) {
        x["delta"] = s.delta;
        x["constant"] = s.constant;
        x["r2"] = s.fit.r2;
    }
    return x;
}

}  // namespace

nlohmann::json to_json(const WeakTypeReport& r) {
    nlohmann::json j;
    j["polynomial"] = r.polynomial;
    j["q_max"] = r.q_max;
    for (const auto& e : r.corpus)
        j["corpus"].push_back({{"name", e.name},
                               {"kind", kind_name(e.kind)},
                               {"W", e.W},
                               {"scale_deviation", e.scale_deviation},
                               {"translate_deviation", e.translate_deviation}});
    j["W"] = r.W;
    j["W_min"] = r.W_min;
    j["W_median"] = r.W_median;
    j["spread"] = r.spread;
    j["half_W"] = {r.half_W_first, r.half_W_second};
    j["corpus_deviation"] = r.corpus_deviation;
    j["max_scale_deviation"] = r.max_scale_deviation;
    j["max_translate_deviation"] = r.max_translate_deviation;
    j["width_cells"] = r.width_cells;
    j["width_W"] = r.width_W;
    j["width_blowup"] = r.width_blowup;
    j["vertices"] = nlohmann::json::array();
    for (const auto& v : r.vertices)
        j["vertices"].push_back({{"vertex", v.vertex}, {"zero_coordinates", v.zero_coordinates}, {"W", v.W}});
    j["slices"] = nlohmann::json::array();
    for (const auto& s : r.slices) j["slices"].push_back(decay_json(s));
    j["axis_slices"] = nlohmann::json::array();
    for (const auto& s : r.axis_slices) j["axis_slices"].push_back(decay_json(s));
    j["depth_decay"] = r.depth_decay();
    j["axis_decay"] = r.axis_decay();
    return j;
}

}  // namespace polymax
