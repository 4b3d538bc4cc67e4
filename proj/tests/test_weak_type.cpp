#include <algorithm>
#include <cmath>
#include <sstream>

#include "doctest.h"
#include "polymax/weak_type.hpp"

using namespace polymax;

namespace {

const GridSpec kGrid = make_grid(-4, 4, 1.0 / 256);
const GridSpec kWide = make_grid(-8, 8, 1.0 / 128);

double relative(double a, double b) { return std::abs(a / b - 1.0); }

}  // namespace

TEST_CASE("distribution of the line operator on an indicator") {
    auto f = GridFunction::indicator(kGrid, 0, 1);
    auto r = maximal_continuous(f, parse_polynomial("t1", 1), 8);
    auto c = distribution_function(r, {0.25, 0.5, 0.75});
    CHECK(std::abs(c.measure[0] - 1.75) <= 2 * kGrid.dx);
    CHECK(std::abs(c.measure[1] - 1.5) <= 2 * kGrid.dx);
    CHECK(std::abs(c.measure[2] - 1.25) <= 2 * kGrid.dx);
    CHECK(distribution_function(r, {1.5 * r.sup()}).measure[0] == 0.0);
    auto w = weak_type_functional(r, f.mass());
    CHECK(w.W == doctest::Approx(1.0).epsilon(0.02));
    CHECK(w.W <= w.chebyshev);
}

TEST_CASE("distribution of a vanishing function") {
    auto z = GridFunction::zero(kGrid);
    auto r = maximal_continuous(z, parse_polynomial("t1^2 + t1*t2", 2), 4);
    auto c = distribution_function(r, {1e-6, 1e-3, 1.0});
    for (double m : c.measure) CHECK(m == 0.0);
    CHECK(alpha_grid(0.0).empty());
    CHECK_THROWS(weak_type_functional(r, 0.0));
    CHECK_THROWS(distribution_function(r, {1.0, 0.5}));
    CHECK_THROWS(distribution_function(r, {0.0, 1.0}));
}

TEST_CASE("alpha grid spans the range") {
    auto a = alpha_grid(2.0);
    REQUIRE(a.size() == 64);
    CHECK(a.front() == doctest::Approx(2e-3));
    CHECK(a.back() == doctest::Approx(3.0));
    for (std::size_t i = 1; i < a.size(); ++i) CHECK(a[i] > a[i - 1]);
}

TEST_CASE("weak functional is homogeneous and translation invariant") {
    auto p = parse_polynomial("t1^2*t2 + t1*t2^3", 2);
    auto base = indicator_function(kGrid, -1.0, -0.3);
    auto bigger = scaled(base, 7.0);
    auto moved = translated(base, 200);
    auto rs = maximal_continuous(FunctionBatch{&base.f, &bigger.f, &moved.f}, p, 4);
    double w0 = weak_type_functional(rs[0], base.mass).W;
    CHECK(w0 > 0);
    CHECK(relative(weak_type_functional(rs[1], bigger.mass).W, w0) < 1e-12);
    CHECK(relative(weak_type_functional(rs[2], moved.mass).W, w0) < 1e-12);
    CHECK_THROWS(translated(base, 2000));
}

TEST_CASE("distribution functions are non-increasing and below chebyshev") {
    auto corpus = standard_corpus(kWide, 3, 8);
    FunctionBatch fs;
    for (const auto& t : corpus) fs.push_back(&t.f);
    auto rs = maximal_continuous(fs, parse_polynomial("t1^2 + t2^3", 2), 4);
    for (std::size_t i = 0; i < rs.size(); ++i) {
        auto w = weak_type_functional(rs[i], corpus[i].mass);
        for (std::size_t k = 1; k < w.curve.measure.size(); ++k) CHECK(w.curve.measure[k] <= w.curve.measure[k - 1]);
        CHECK(std::isfinite(w.W));
        CHECK(w.W > 0);
        CHECK(w.W <= w.chebyshev * (1 + 1e-12));
    }
}

TEST_CASE("test function constructors") {
    auto d = delta_like(kGrid, 0.0, 4 * kGrid.dx, 3.0);
    CHECK(d.mass == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(d.f.sup() == doctest::Approx(3.0 / (4 * kGrid.dx)));
    CHECK_THROWS(delta_like(kGrid, 0.0, kGrid.dx));
    CHECK_THROWS(delta_like(kGrid, 0.0, 2.5 * kGrid.dx));
    CHECK_THROWS(delta_like(kGrid, 3.999, 8 * kGrid.dx));
    auto b = bump_sum(kGrid, {{0.0, 0.5, 2.0}, {1.0, 0.25, 4.0}});
    CHECK(b.mass == doctest::Approx(0.5 + 0.5).epsilon(1e-3));
    CHECK_THROWS(bump_sum(kGrid, {}));
    auto ind = indicator_function(kGrid, 0.1, 0.7);
    CHECK(ind.mass == doctest::Approx(0.6).epsilon(1e-12));
    auto corpus = standard_corpus(kWide);
    REQUIRE(corpus.size() == 20);
    CHECK(corpus[0].kind == TestKind::Indicator);
    CHECK(corpus[1].kind == TestKind::BumpSum);
    CHECK(corpus[3].kind == TestKind::DeltaLike);
    for (const auto& t : corpus) {
        CHECK(t.mass > 0);
        for (std::size_t i = 0; i < t.f.size(); ++i) {
            CHECK(t.f[i] >= 0.0);
            if (t.f[i] > 0) {
                CHECK(kWide.x(i) > -5.0 - kWide.dx);
                CHECK(kWide.x(i) < kWide.dx);
            }
        }
    }
    auto again = standard_corpus(kWide);
    CHECK(again[5].f.values() == corpus[5].f.values());
}

TEST_CASE("monomial weak functional against twice hardy littlewood") {
    auto g = make_grid(-8, 8, 1.0 / 128);
    auto corpus = standard_corpus(g, 1, 8);
    FunctionBatch fs;
    for (const auto& t : corpus) fs.push_back(&t.f);
    auto rs = maximal_continuous(fs, parse_polynomial("t1*t2", 2), 6);
    for (std::size_t i = 0; i < rs.size(); ++i) {
        double w = weak_type_functional(rs[i], corpus[i].mass).W;
        double hl = weak_type_functional(hardy_littlewood(corpus[i].f), corpus[i].mass).W;
        CHECK(w <= 2 * hl * (1 + 5e-2));
    }
}

TEST_CASE("slice pieces of a monomial vanish") {
    auto p = parse_polynomial("t1*t2", 2);
    auto d = build_diagram(p);
    auto f = indicator_function(kGrid, -1, 0);
    auto pieces = slice_pieces({&f.f}, p, d, 4);
    REQUIRE(pieces.size() == 1);
    CHECK(pieces[0].axis.empty());
    REQUIRE(pieces[0].restricted.size() == 1);
    CHECK(*std::max_element(pieces[0].restricted[0].begin(), pieces[0].restricted[0].end()) > 0);
    std::size_t indices = 0;
    for (const auto& piece : pieces[0].depth) {
        indices += piece.indices;
        CHECK(*std::max_element(piece.values.begin(), piece.values.end()) == 0.0);
    }
    CHECK(indices == 25);
    auto decay = slice_decay(pieces[0].depth, kGrid, f.mass);
    REQUIRE(decay.size() == 1);
    CHECK_FALSE(decay[0].fitted);
}

TEST_CASE("slice pieces cover every index once") {
    auto p = parse_polynomial("t1^2 + t1*t2", 2);
    auto d = build_diagram(p);
    auto f = indicator_function(kGrid, -1, 0);
    auto pieces = slice_pieces({&f.f}, p, d, 5);
    std::size_t indices = 0;
    for (const auto& piece : pieces[0].depth) indices += piece.indices;
    CHECK(indices == 36);
    for (std::size_t i = 1; i < pieces[0].depth.size(); ++i) {
        const auto& a = pieces[0].depth[i - 1];
        const auto& b = pieces[0].depth[i];
        CHECK((a.vertex < b.vertex || (a.vertex == b.vertex && a.N < b.N)));
    }
    bool zero = false;
    for (const auto& v : d.vertices) zero = zero || v.has_zero_coords();
    CHECK(zero == !pieces[0].axis.empty());
    CHECK_THROWS(slice_pieces({}, p, d, 5));
    CHECK_THROWS(slice_pieces({&f.f}, p, d, 0));
}

TEST_CASE("decay fit on synthetic functionals") {
    SliceDecay s;
    s.N = {0, 1, 2, 3, 4};
    s.W = {4.0, 2.0, 1.0, 0.5, 0.0};
    fit_decay(s);
    CHECK(s.fitted);
    CHECK(s.delta == doctest::Approx(1.0));
    CHECK(s.constant == doctest::Approx(4.0));
    s.W = {1.0, 0.0, 0.5, 0.0, 0.0};
    fit_decay(s);
    CHECK_FALSE(s.fitted);
}

TEST_CASE("stability sweep") {
    auto p = parse_polynomial("t1^2*t2 + t1*t2^3", 2);
    auto corpus = standard_corpus(kWide, 1, 8);
    SweepOptions o;
    o.q_max = 8;
    o.width_cells = {2, 4, 8, 16, 32};
    o.shifts = {-300, 411};
    auto r = stability_sweep(p, corpus, o);
    CHECK(r.q_max == 8);
    CHECK(r.scale_invariant());
    CHECK(r.corpus_stable(0.2));
    CHECK_FALSE(r.width_blowup);
    CHECK(r.depth_decay());
    CHECK(r.axis_slices.empty());
    REQUIRE(r.vertices.size() == 2);
    REQUIRE(r.slices.size() == 2);
    for (const auto& s : r.slices) {
        CHECK(s.fitted);
        CHECK(s.delta > 0);
    }
    CHECK(r.W == doctest::Approx(std::max(r.half_W_first, r.half_W_second)));
    CHECK(r.W_min <= r.W_median);
    CHECK(r.W_median <= r.W);
    std::ostringstream os;
    r.write_slice_csv(os);
    CHECK(os.str().rfind("vertex,N,W,fit_delta\n", 0) == 0);
    auto j = to_json(r);
    CHECK(j["depth_decay"].get<bool>());
    CHECK(j["corpus"].size() == 8);
    CHECK_THROWS(stability_sweep(p, {}, o));
}

TEST_CASE("bump heights scaled by a thousand") {
    auto p = parse_polynomial("t1^2*t2 + t1*t2^3", 2);
    auto g = make_grid(-8, 8, 1.0 / 128);
    std::vector<TestFunction> bumps, big;
    for (const auto& t : standard_corpus(g, 5, 20))
        if (t.kind == TestKind::BumpSum) {
            bumps.push_back(t);
            auto parts = t.parts;
            for (auto& b : parts) b.height *= 1e3;
            big.push_back(bump_sum(g, parts));
        }
    FunctionBatch fs;
    for (const auto& t : bumps) fs.push_back(&t.f);
    for (const auto& t : big) fs.push_back(&t.f);
    auto rs = maximal_continuous(fs, p, 4);
    double w = 0.0, wb = 0.0;
    for (std::size_t i = 0; i < bumps.size(); ++i) {
        w = std::max(w, weak_type_functional(rs[i], bumps[i].mass).W);
        wb = std::max(wb, weak_type_functional(rs[bumps.size() + i], big[i].mass).W);
    }
    CHECK(std::isfinite(w));
    CHECK(relative(wb, w) <= 1e-9);
}

TEST_CASE("zero coordinate sweep has axis decay") {
    auto p = parse_polynomial("t1^2 + t1*t2", 2);
    auto corpus = standard_corpus(kWide, 2, 4);
    SweepOptions o;
    o.q_max = 10;
    o.width_cells = {2, 8, 32};
    o.shifts = {-300};
    auto r = stability_sweep(p, corpus, o);
    CHECK_FALSE(r.axis_slices.empty());
    for (const auto& s : r.axis_slices) CHECK(s.zero_coordinates);
    CHECK(r.depth_decay());
    CHECK(r.axis_decay());
}
