#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "polymax/maximal.hpp"

using namespace polymax;

namespace {

const GridSpec kGrid = make_grid(-4, 4, 1.0 / 128);

std::size_t cell_of(const GridSpec& g, double x) { return static_cast<std::size_t>((x - g.x_lo) / g.dx); }

double value_at(const MaximalResult& r, double x) { return r.values[cell_of(r.grid, x)]; }

// Uncentred maximal function by scanning every cell interval.
std::vector<double> hl_scan(const GridFunction& f) {
    const std::size_t n = f.size();
    std::vector<double> out(n, 0.0);
    for (std::size_t a = 0; a < n; ++a) {
        double s = 0.0;
        for (std::size_t b = a; b < n; ++b) {
            s += f[b];
            double avg = s / static_cast<double>(b - a + 1);
            for (std::size_t i = a; i <= b; ++i) out[i] = std::max(out[i], avg);
        }
    }
    return out;
}

GridFunction random_bumps(const GridSpec& g, std::mt19937_64& rng, int count) {
    std::uniform_real_distribution<double> pos(-2.5, 2.0), width(0.05, 0.8), height(0.2, 3);
    std::vector<double> v(g.cells, 0.0);
    for (int k = 0; k < count; ++k) {
        double a = pos(rng), w = width(rng), h = height(rng);
        for (std::size_t i = 0; i < g.cells; ++i)
            if (g.x(i) >= a && g.x(i) < a + w) v[i] += h;
    }
    return GridFunction(g, v);
}

Polynomial random_poly(std::mt19937_64& rng, int n) {
    std::uniform_int_distribution<int> e(0, 3), terms(1, 3);
    std::uniform_real_distribution<double> c(-1.5, 1.5);
    std::map<Exponent, double> m;
    int t = terms(rng);
    while (static_cast<int>(m.size()) < t) {
        Exponent x(n);
        int deg = 0;
        for (auto& xi : x) deg += (xi = e(rng));
        if (deg == 0) continue;
        double a = c(rng);
        if (std::abs(a) < 0.2) a = 0.5;
        m[x] = a;
    }
    return Polynomial(n, m);
}

}  // namespace

TEST_CASE("zero function gives zero") {
    auto z = GridFunction::zero(kGrid);
    auto p = parse_polynomial("t1^2 + t1*t2", 2);
    CHECK(maximal_continuous(z, p, 4).sup() == 0.0);
    CHECK(maximal_dyadic(z, p, 4).sup() == 0.0);
    CHECK(hardy_littlewood(z).sup() == 0.0);
}

TEST_CASE("continuous operator for P = t on an indicator") {
    auto f = GridFunction::indicator(kGrid, 0, 1);
    auto r = maximal_continuous(f, parse_polynomial("t1", 1), 8);
    CHECK(value_at(r, 0.5) == doctest::Approx(1.0).epsilon(0.02));
    CHECK(value_at(r, 1.5) == doctest::Approx(0.5).epsilon(0.02));
    CHECK(value_at(r, 1.25) == doctest::Approx(0.75).epsilon(0.02));
    CHECK(value_at(r, 2.5) == 0.0);
    CHECK(value_at(r, -0.5) < 1e-12);
    // Maximiser at 1.5 is the longest side h = 1.
    CHECK(r.argmax[cell_of(kGrid, 1.5)] == IntVec{0});
}

TEST_CASE("continuous operator for P = t1 t2 at one half") {
    auto f = GridFunction::indicator(kGrid, 0, 1);
    auto r = maximal_continuous(f, parse_polynomial("t1*t2", 2), 8);
    CHECK(value_at(r, 0.5) == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("dyadic averages of a constant") {
    auto f = GridFunction::constant(kGrid, 2.5);
    auto p = parse_polynomial("t1^2 - t1*t2 + t2^3", 2);
    auto r = maximal_dyadic(f, p, 5);
    for (double x = -2; x <= 2; x += 0.25) CHECK(value_at(r, x) == doctest::Approx(2.5).epsilon(1e-12));
    auto e = maximal_dyadic(f, p, 5, DyadicForm::Eta);
    // Eta form has mass 2.25 per axis; q = 0 reaches values up to 80 so interior points use q >= 3.
    for (double x = -1; x <= 1; x += 0.25) CHECK(value_at(e, x) == doctest::Approx(2.5 * 2.25 * 2.25).epsilon(1e-9));
}

TEST_CASE("dyadic operator for P = t at one half") {
    auto f = GridFunction::indicator(kGrid, 0, 1);
    auto r = maximal_dyadic(f, parse_polynomial("t1", 1), 6);
    CHECK(value_at(r, 0.5) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("hardy littlewood values") {
    auto f = GridFunction::indicator(kGrid, 0, 1);
    auto r = hardy_littlewood(f);
    CHECK(value_at(r, 0.5) == 1.0);
    CHECK(value_at(r, 2.0) == doctest::Approx(0.5).epsilon(2 * kGrid.dx));
    CHECK(value_at(r, 3.0) == doctest::Approx(1.0 / 3).epsilon(2 * kGrid.dx));
    auto c = hardy_littlewood(GridFunction::constant(kGrid, 1.5));
    for (double v : c.values) CHECK(v == doctest::Approx(1.5).epsilon(1e-14));

    std::vector<double> spike(kGrid.cells, 0.0);
    spike[cell_of(kGrid, kGrid.dx / 2)] = 1.0 / kGrid.dx;
    auto s = hardy_littlewood(GridFunction(kGrid, spike));
    CHECK(value_at(s, 1.0) == doctest::Approx(1.0).epsilon(2 * kGrid.dx));
}

TEST_CASE("hardy littlewood matches an interval scan") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 5; ++trial) {
        auto f = random_bumps(make_grid(-4, 4, 1.0 / 8), rng, 3);
        auto fast = hardy_littlewood(f);
        auto slow = hl_scan(f);
        for (std::size_t i = 0; i < f.size(); ++i) CHECK(fast.values[i] == doctest::Approx(slow[i]).epsilon(1e-13));
        for (std::size_t i = 0; i < f.size(); ++i) {
            auto a = static_cast<std::size_t>(fast.argmax[i][0]), b = static_cast<std::size_t>(fast.argmax[i][1]);
            CHECK(a <= i);
            CHECK(b >= i);
        }
    }
}

TEST_CASE("monomial domination") {
    auto f = GridFunction::indicator(kGrid, 0, 1);
    auto line = monomial_domination_check(f, parse_polynomial("t1", 1), 8);
    CHECK(line.passed);
    CHECK(line.max_ratio <= 1.0 + 2e-2);
    auto hyper = monomial_domination_check(f, parse_polynomial("t1*t2", 2), 8);
    CHECK(hyper.passed);
    CHECK(hyper.max_ratio <= 2.0 * (1 + 5e-2));
    auto zero = monomial_domination_check(GridFunction::zero(kGrid), parse_polynomial("t1^2*t2", 2), 4);
    CHECK(zero.passed);
    CHECK(zero.max_ratio == 0.0);
    CHECK_THROWS(monomial_domination_check(f, parse_polynomial("t1 + t2", 2), 4));
    CHECK_THROWS(monomial_domination_check(f, parse_polynomial("-t1", 1), 4));
}

TEST_CASE("dyadic and continuous forms dominate each other on random pairs") {
    std::mt19937_64 rng(2024);
    const int k = 5;
    for (int trial = 0; trial < 20; ++trial) {
        const int n = 1 + trial % 2;
        auto p = random_poly(rng, n);
        auto f = random_bumps(kGrid, rng, 2);
        auto cont = maximal_continuous(f, p, k);
        auto box = maximal_dyadic(f, p, k, DyadicForm::Box);
        auto eta = maximal_dyadic(f, p, k + 4, DyadicForm::Eta);
        const double tol = 2e-2 * f.sup();
        const double two_n = std::pow(2.0, n), four_n = std::pow(4.0, n);
        std::size_t bad_box = 0, bad_eta = 0;
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (box.values[i] > two_n * cont.values[i] + tol) ++bad_box;
            if (cont.values[i] > four_n * eta.values[i] + tol) {
                ++bad_eta;
                MESSAGE(kGrid.x(i), " ", cont.values[i], " ", eta.values[i]);
            }
        }
        CHECK_MESSAGE(bad_box == 0, p.to_string());
        CHECK_MESSAGE(bad_eta == 0, p.to_string());
    }
}

TEST_CASE("operators are homogeneous and monotone") {
    std::mt19937_64 rng(5);
    auto p = parse_polynomial("t1^2*t2 + t1*t2^3", 2);
    auto f = random_bumps(kGrid, rng, 3);
    auto extra = random_bumps(kGrid, rng, 2);
    std::vector<double> gv(f.values());
    for (std::size_t i = 0; i < gv.size(); ++i) gv[i] += extra[i];
    GridFunction g(kGrid, gv);
    auto f3 = f.scaled(3.0);
    auto batch = maximal_dyadic(FunctionBatch{&f, &f3, &g}, p, 5, DyadicForm::Eta);
    auto cont = maximal_continuous(FunctionBatch{&f, &f3, &g}, p, 4);
    auto hl_f = hardy_littlewood(f), hl_f3 = hardy_littlewood(f3), hl_g = hardy_littlewood(g);
    const double eps = 1e-12 * batch[2].sup();
    for (std::size_t i = 0; i < f.size(); ++i) {
        CHECK(std::abs(batch[1].values[i] - 3 * batch[0].values[i]) <= 3 * eps);
        CHECK(batch[0].values[i] <= batch[2].values[i] + eps);
        CHECK(std::abs(cont[1].values[i] - 3 * cont[0].values[i]) <= 3 * eps);
        CHECK(cont[0].values[i] <= cont[2].values[i] + eps);
        CHECK(hl_f3.values[i] == doctest::Approx(3 * hl_f.values[i]).epsilon(1e-14));
        CHECK(hl_f.values[i] <= hl_g.values[i] * (1 + 1e-14));
    }
}

TEST_CASE("cone restricted pieces") {
    std::mt19937_64 rng(9);
    auto f = random_bumps(kGrid, rng, 3);
    const int q_max = 5;

    SUBCASE("single vertex covers everything") {
        auto p = parse_polynomial("t1*t2", 2);
        auto d = build_diagram(p);
        auto full = maximal_dyadic(f, p, q_max, DyadicForm::Eta);
        auto r = maximal_cone_restricted(f, p, d, 0, q_max);
        CHECK(r.indices == 36);
        for (std::size_t i = 0; i < f.size(); ++i) CHECK(r.restricted.values[i] == full.values[i]);
        CHECK(r.remainder.sup() < 1e-12 * full.sup());
        CHECK_THROWS(maximal_cone_restricted(f, p, d, 1, q_max));
    }

    SUBCASE("two vertices partition the sup") {
        auto p = parse_polynomial("t1^2*t2 + t1*t2^3", 2);
        auto d = build_diagram(p);
        auto full = maximal_dyadic(f, p, q_max, DyadicForm::Eta);
        auto all = maximal_cone_restricted_all({&f}, p, d, q_max)[0];
        REQUIRE(all.size() == 2);
        CHECK(all[0].indices + all[1].indices == 36);
        for (std::size_t i = 0; i < f.size(); ++i) {
            double joined = std::max(all[0].restricted.values[i], all[1].restricted.values[i]);
            CHECK(std::abs(joined - full.values[i]) <= 1e-12 * std::max(1.0, full.values[i]));
            double sum = all[0].restricted.values[i] + all[1].restricted.values[i];
            CHECK(sum >= full.values[i] - 1e-12);
            for (const auto& piece : all) {
                CHECK(piece.restricted.values[i] <= full.values[i] + 1e-12);
                CHECK(piece.restricted.values[i] <=
                      piece.comparison.values[i] + piece.remainder.values[i] + 1e-12 * full.sup());
            }
        }
    }

    SUBCASE("zero-coordinate part with fewer parameters") {
        auto p = parse_polynomial("t1^2 + t1*t2", 2);
        auto d = build_diagram(p);
        std::size_t j = 0;
        while (d.vertices[j].vertex != Exponent{2, 0}) ++j;
        REQUIRE(d.vertices[j].has_zero_coords());
        auto reduced = zero_part_reduced(f, p, d, j, q_max);
        auto direct = zero_part_direct(f, p, d, j, q_max);
        const double scale = direct.sup();
        REQUIRE(scale > 0);
        for (std::size_t i = 0; i < f.size(); ++i)
            CHECK(std::abs(reduced.values[i] - direct.values[i]) <= 1e-3 * scale);
        auto r = maximal_cone_restricted(f, p, d, j, q_max);
        for (std::size_t i = 0; i < f.size(); ++i) {
            CHECK(std::abs(r.comparison.values[i] - reduced.values[i]) <= 2e-2 * scale);
            CHECK(r.restricted.values[i] <= r.comparison.values[i] + r.remainder.values[i] + 1e-12 * scale);
        }
    }
}

TEST_CASE("restrict variables") {
    auto p = parse_polynomial("2*t1^2*t3 + t3", 3);
    auto r = restrict_variables(p, {0, 2});
    CHECK(r.dim() == 2);
    CHECK(r.coeff({2, 1}) == 2.0);
    CHECK(r.coeff({0, 1}) == 1.0);
    CHECK_THROWS(restrict_variables(p, {0, 1}));
}

TEST_CASE("maximal result csv") {
    auto g = make_grid(0, 1, 0.5);
    auto r = hardy_littlewood(GridFunction::indicator(g, 0, 0.5));
    std::ostringstream os;
    r.write_csv(os);
    CHECK(os.str() == "x,value,argmax\n0.25,1,0;0\n0.75,0.5,0;1\n");
}
