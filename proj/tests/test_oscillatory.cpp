#include <cmath>
#include <random>

#include "doctest.h"
#include "polymax/oscillatory.hpp"

using namespace polymax;

namespace {

std::size_t vertex_index(const NewtonDiagram& d, const Exponent& e) {
    for (std::size_t j = 0; j < d.vertices.size(); ++j)
        if (d.vertices[j].vertex == e) return j;
    FAIL("vertex not found");
    return 0;
}

struct Slice {
    Polynomial p;
    NewtonDiagram d;
    std::size_t j;
};

Slice two_term() {
    auto p = parse_polynomial("t1^2*t2 + t1*t2^3", 2);
    auto d = build_diagram(p);
    auto j = vertex_index(d, {1, 3});
    return {p, d, j};
}

VertexData line_vertex(int e) {
    VertexData v;
    v.vertex = {e};
    v.nonzero_coords = {0};
    return v;
}

}  // namespace

TEST_CASE("a monomial gives the zero measure") {
    auto p = parse_polynomial("3*t1*t2^2", 2);
    auto d = build_diagram(p);
    auto m = build_measure(p, d.vertices[0], 0, {5, 7});
    CHECK(m.vanishing);
    CHECK(m.total_variation() == 0.0);
    CHECK(l1_modulus(m, 1.0) == 0.0);
    auto prof = fourier_transform(m, {0.5, 2.0});
    CHECK(prof.magnitude[0] == 0.0);
    CHECK(prof.magnitude[1] == 0.0);
}

TEST_CASE("slice measure has zero mass and bounded support") {
    auto s = two_term();
    auto m = build_measure(s.p, s.d.vertices[s.j], s.j, {0, 0});
    CHECK_FALSE(m.vanishing);
    CHECK(std::abs(m.mass()) <= 1e-10);
    CHECK(m.radius <= 320.0);
    CHECK(m.histogram_radius() <= m.radius + m.bin_width);
    CHECK(m.total_variation() <= m.tv_bound * (1 + 1e-9));
    CHECK(m.total_variation() > 0.0);
    CHECK(m.gradient_floor > 0.0);
}

TEST_CASE("non-integral slice index gives the zero measure") {
    auto p = parse_polynomial("t1^3 + t1*t2^2 + t2^5", 2);
    auto d = build_diagram(p);
    for (std::size_t j = 0; j < d.vertices.size(); ++j) {
        const auto& v = d.vertices[j];
        if (v.has_zero_coords() || v.d == 1) continue;
        for (std::int64_t N = 1; N < v.d + 1; ++N) {
            IntVec k(static_cast<std::size_t>(v.dim() - 1), 0);
            if (slice_index(v, N, 0, k)) continue;
            auto m = build_slice_measure(p, d, j, N, 0, k);
            CHECK(m.vanishing);
            CHECK(m.q.empty());
        }
    }
}

TEST_CASE("first integral offset gives an integral slice") {
    auto s = two_term();
    const auto& v = s.d.vertices[s.j];
    for (std::int64_t N = 0; N < 9; ++N) {
        auto k = first_integral_offset(v, N, 0);
        REQUIRE(k);
        CHECK(slice_index(v, N, 0, *k));
    }
}

TEST_CASE("transform at low frequency is linear and within the mean value bound") {
    auto s = two_term();
    auto m = build_slice_measure(s.p, s.d, s.j, 3, 0, *first_integral_offset(s.d.vertices[s.j], 3, 0));
    auto prof = fourier_transform(m, frequency_grid(m));
    for (std::size_t k = 0; k < prof.xi.size(); ++k) CHECK(prof.magnitude[k] <= prof.mean_value_bound[k] * (1 + 1e-6) + 1e-12);
    auto [lo, hi] = small_band(m);
    auto f = decay_fit(prof, lo, hi);
    CHECK(f.line.slope == doctest::Approx(1.0).epsilon(0.02));
    CHECK(f.line.r2 >= 0.99);
    auto zero = fourier_transform(m, {1e-9});
    CHECK(zero.magnitude[0] <= zero.mean_value_bound[0] * (1 + 1e-6));
    CHECK(zero.magnitude[0] <= 1e-6);
}

TEST_CASE("histogram transform agrees with the quadrature") {
    auto s = two_term();
    auto m = build_slice_measure(s.p, s.d, s.j, 2, 0, *first_integral_offset(s.d.vertices[s.j], 2, 0));
    std::vector<double> xi;
    const double top = 1.0 / (8.0 * m.bin_width);
    for (int i = 0; i < 16; ++i) xi.push_back(top * std::exp2(-0.5 * i));
    auto prof = fourier_transform(m, xi);
    double sup = 0.0;
    for (double x : prof.magnitude) sup = std::max(sup, x);
    for (std::size_t k = 0; k < xi.size(); ++k) {
        auto h = lattice_transform(m.density, xi[k]);
        CHECK_MESSAGE(std::abs(h - prof.value[k]) <= 0.02 * sup, "xi ", xi[k]);
    }
}

TEST_CASE("refinement reaches the requested tolerance") {
    auto s = two_term();
    auto m = build_slice_measure(s.p, s.d, s.j, 4, 0, *first_integral_offset(s.d.vertices[s.j], 4, 0));
    FourierOptions o;
    auto prof = fourier_transform(m, {0.3, 3.0}, o);
    for (std::size_t k = 0; k < 2; ++k) CHECK(prof.change[k] <= o.tolerance * prof.magnitude[k] + o.noise_floor);
    FourierOptions tight = o;
    tight.max_nodes = 64;
    CHECK_THROWS_AS(fourier_transform(m, {3.0}, tight), FourierError);
}

TEST_CASE("one dimensional perturbation decays at large frequency") {
    auto p = parse_polynomial("t1^2 + t1^3", 1);
    auto v = line_vertex(2);
    for (std::int64_t N : {2, 4, 6}) {
        auto m = build_measure(p, v, 0, {N});
        REQUIRE_FALSE(m.vanishing);
        CHECK(m.comparison->as_map().size() == 1);
        CHECK(m.comparison->coeff({2}) == 1.0);
        auto prof = fourier_transform(m, frequency_grid(m));
        auto [lo, hi] = large_band(m);
        auto f = decay_fit(prof, lo, hi);
        CHECK_FALSE(f.vanishing);
        CHECK(f.line.slope < 0.0);
    }
}

TEST_CASE("small band constant halves with each slice") {
    auto p = parse_polynomial("t1^2 + t1^3", 1);
    auto v = line_vertex(2);
    std::vector<double> n, c;
    for (std::int64_t N = 2; N <= 8; ++N) {
        auto m = build_measure(p, v, 0, {N});
        auto prof = fourier_transform(m, frequency_grid(m));
        auto [lo, hi] = small_band(m);
        n.push_back(static_cast<double>(N));
        c.push_back(std::log2(decay_fit(prof, lo, hi).origin_constant));
    }
    auto f = fit_line(n, c);
    CHECK(f.slope == doctest::Approx(-1.0).epsilon(0.02));
}

TEST_CASE("decay fit needs enough frequencies") {
    FourierProfile p;
    for (int i = 0; i < 5; ++i) {
        p.xi.push_back(i + 1.0);
        p.magnitude.push_back(1.0);
    }
    CHECK_THROWS(decay_fit(p, 0.5, 10.0));
    FourierProfile z;
    for (int i = 0; i < 10; ++i) {
        z.xi.push_back(i + 1.0);
        z.magnitude.push_back(0.0);
    }
    CHECK(decay_fit(z, 0.5, 20.0).vanishing);
}

TEST_CASE("frequency grid covers both bands") {
    auto s = two_term();
    auto m = build_slice_measure(s.p, s.d, s.j, 2, 0, *first_integral_offset(s.d.vertices[s.j], 2, 0));
    FrequencyBands b;
    auto xi = frequency_grid(m, b);
    CHECK(xi.size() == 2 * static_cast<std::size_t>(b.per_band));
    CHECK(std::is_sorted(xi.begin(), xi.end()));
    CHECK(xi.front() == doctest::Approx(b.small_lo / m.radius));
    CHECK(xi.back() == doctest::Approx(b.large_hi / m.gradient_floor));
}

TEST_CASE("l1 modulus trivial cases") {
    auto s = two_term();
    auto m = build_slice_measure(s.p, s.d, s.j, 2, 0, *first_integral_offset(s.d.vertices[s.j], 2, 0));
    CHECK(l1_modulus(m, 0.0) == 0.0);
    CHECK_THROWS(l1_modulus(m, m.bin_width));
    double tv = m.total_variation();
    double far = l1_modulus(m, 4.0 * m.radius);
    CHECK(far == doctest::Approx(2.0 * tv).epsilon(1e-9));
    double near = l1_modulus(m, 4.0 * m.bin_width);
    CHECK(near <= 2.0 * tv);
    CHECK(near >= 0.0);
}

TEST_CASE("shifted l1 of a point mass") {
    LatticeMeasure m;
    m.h = 1.0;
    m.first = 0;
    m.w = {1.0};
    CHECK(l1_shift_outside(m, 3.0, 0.0) == doctest::Approx(2.0));
    CHECK(l1_shift_outside(m, 3.0, 10.0) == 0.0);
    CHECK(l1_shift_outside(m, 3.0, 2.0) == doctest::Approx(1.0));
}

TEST_CASE("excluded shifted terms vanish") {
    auto s = two_term();
    const auto& v = s.d.vertices[s.j];
    MeasureOptions o;
    o.bins_exponent = 10;
    for (double y : {4.0, 40.0}) {
        auto rep = shifted_sum_bound(s.p, s.d, s.j, 2, 0, 6, y, o);
        CHECK(rep.excluded_nonzero == 0);
        for (const auto& t : rep.terms)
            if (t.excluded) CHECK(t.value == 0.0);
        CHECK(rep.included + rep.excluded > 0);
    }
    auto m = build_slice_measure(s.p, s.d, s.j, 2, 0, *first_integral_offset(v, 2, 0), o);
    auto rep = shifted_sum_bound(s.p, s.d, s.j, 2, 0, 3, 2.5 * m.radius, o);
    CHECK(rep.sum == 0.0);
    CHECK(rep.included == 0);
    CHECK(shifted_sum_reach(v, 0, m.radius, 1.0) >= 1);
}

TEST_CASE("dilation moves the measure") {
    auto s = two_term();
    const auto& v = s.d.vertices[s.j];
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> pick(0, 3);
    for (int trial = 0; trial < 4; ++trial) {
        std::int64_t N = 2 + pick(rng);
        IntVec k{static_cast<std::int64_t>(pick(rng))};
        if (!slice_index(v, N, 0, k)) continue;
        double a = slice_dilation(v, 0, k);
        MeasureOptions base;
        base.bins_exponent = 12;
        auto m1 = build_slice_measure(s.p, s.d, s.j, N, 0, k, base);
        MeasureOptions dil = base;
        dil.dilation = a;
        dil.bin_width = m1.bin_width;
        auto ma = build_slice_measure(s.p, s.d, s.j, N, 0, k, dil);
        auto moved = resample(m1.density, a, m1.bin_width);
        double tol = 4.0 * m1.bin_width * m1.total_variation();
        CHECK_MESSAGE(cdf_distance(moved, ma.density) <= tol, "N ", N, " k ", k[0]);
        CHECK(ma.radius == doctest::Approx(a * m1.radius));
    }
}

TEST_CASE("cdf distance of shifted point masses") {
    LatticeMeasure a, b;
    a.h = b.h = 0.5;
    a.first = 0;
    a.w = {1.0};
    b.first = 4;
    b.w = {1.0};
    CHECK(cdf_distance(a, b) == doctest::Approx(2.0));
    CHECK(cdf_distance(a, a) == 0.0);
    auto r = resample(a, 3.0, 0.5);
    CHECK(r.mass() == doctest::Approx(1.0));
}

TEST_CASE("sublevel sets of simple gradients") {
    SublevelOptions o;
    o.grid_points = 1 << 16;
    o.samples = 1 << 12;
    auto lin = sublevel_measure(parse_polynomial("t1 + 2*t2", 2), {1.0, 2.0, 3.0}, o);
    CHECK(lin.grid_measure[0] == 0.0);
    CHECK(lin.grid_measure[1] == 0.0);
    CHECK(lin.grid_measure[2] == doctest::Approx(lin.box_measure).epsilon(1e-9));
    CHECK_FALSE(lin.fitted);
    auto sq = sublevel_measure(parse_polynomial("t1^2", 1), {0.5, 0.9}, o);
    CHECK(sq.grid_measure[0] == 0.0);
    CHECK(sq.grid_measure[1] == 0.0);
    auto well = sublevel_measure(parse_polynomial("t1^2 - 4*t1 + 5", 1), o);
    REQUIRE(well.fitted);
    CHECK(well.fit.slope == doctest::Approx(1.0).epsilon(0.1));
    CHECK(well.fit.r2 >= 0.99);
    const double n = static_cast<double>(o.samples);
    const double cell = well.box_measure / static_cast<double>(o.grid_points);
    for (std::size_t i = 0; i < well.level.size(); ++i) {
        double s = well.level[i];
        if (s > 3.0) continue;
        CHECK(std::abs(well.grid_measure[i] - s) <= 2.0 * cell);
        double frac = s / well.box_measure;
        CHECK(std::abs(well.sample_measure[i] - s) <= 5.0 * well.box_measure * std::sqrt(frac * (1 - frac) / n) + cell);
    }
}

TEST_CASE("zero coordinate measures split by gradient level") {
    auto p = parse_polynomial("t1^2 - t1^3 + t2", 2);
    auto d = build_diagram(p);
    auto j = vertex_index(d, {2, 0});
    const auto& v = d.vertices[j];
    REQUIRE(v.has_zero_coords());
    IntVec kbar(v.zero_coords.size(), 2), lbar(v.b_normals().size(), 0);
    auto nd = build_zero_measure(p, d, j, kbar, lbar, MeasureRegion::Nondegenerate);
    auto dg = build_zero_measure(p, d, j, kbar, lbar, MeasureRegion::Degenerate);
    auto full = build_zero_measure(p, d, j, kbar, lbar, MeasureRegion::Full);
    CHECK(nd.region_mass + dg.region_mass == doctest::Approx(full.region_mass));
    CHECK(nd.level == doctest::Approx(nondegenerate_level(v, kbar, 0.25)));
    if (!nd.vanishing) CHECK(nd.gradient_floor >= nd.level * (1 - 1e-12));
}

TEST_CASE("json carries the measure summary") {
    auto s = two_term();
    auto m = build_slice_measure(s.p, s.d, s.j, 2, 0, *first_integral_offset(s.d.vertices[s.j], 2, 0));
    auto j = to_json(m);
    CHECK(j["region"] == "full");
    CHECK(j["vanishing"] == false);
    CHECK(j.contains("main"));
    CHECK(j["radius"].get<double>() == m.radius);
}
