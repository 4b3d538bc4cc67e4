#include <random>

#include "doctest.h"
#include "polymax/cz.hpp"

using namespace polymax;

namespace {

void require_clean(const CZReport& rep) {
    for (const auto& c : rep.checks) CHECK_MESSAGE(c.passed, c.name, " measured ", c.measured);
}

GridFunction random_steps(std::mt19937_64& rng, const GridSpec& g) {
    std::uniform_int_distribution<int> count(1, 6);
    std::uniform_real_distribution<double> pos(g.x_lo, g.x_hi()), width(0.01, 2.0), height(0.1, 10.0);
    std::vector<double> v(g.cells, 0.0);
    int k = count(rng);
    for (int i = 0; i < k; ++i) {
        double a = pos(rng), w = width(rng), h = height(rng);
        for (std::size_t c = 0; c < g.cells; ++c)
            if (g.x(c) >= a && g.x(c) < a + w) v[c] += h;
    }
    v[g.cells / 2] += 1.0;
    return GridFunction(g, v);
}

}  // namespace

TEST_CASE("stopping time on an indicator") {
    auto g = make_grid(-2, 2, 1.0 / 64);
    auto f = GridFunction::indicator(g, 0, 1);
    auto r = cz_decompose(f, 0.25);
    CHECK(r.root.x_lo == -2.0);
    CHECK(r.root.x_hi() == 2.0);
    REQUIRE(r.cubes.size() == 1);
    CHECK(r.cubes[0].lo == 0.0);
    CHECK(r.cubes[0].hi == 2.0);
    CHECK(r.cubes[0].average == 0.5);
    CHECK(r.omega_measure == 2.0);
    for (std::size_t i = 0; i < r.root.cells; ++i) {
        double x = r.root.x(i);
        if (x >= 0 && x < 2) {
            CHECK(r.good[i] == 0.5);
            CHECK(r.bad[i] == (x < 1 ? 0.5 : -0.5));
        } else {
            CHECK(r.good[i] == 0.0);
            CHECK(r.bad[i] == 0.0);
        }
    }
    auto rep = cz_verify(r, f);
    require_clean(rep);
    CHECK(rep.passed());
}

TEST_CASE("level above every average leaves omega empty") {
    auto g = make_grid(-2, 2, 1.0 / 64);
    auto f = GridFunction::indicator(g, 0, 1);
    auto r = cz_decompose(f, 2.0);
    CHECK(r.cubes.empty());
    CHECK(r.omega_measure == 0.0);
    for (std::size_t i = 0; i < r.root.cells; ++i) CHECK(r.bad[i] == 0.0);
    auto v = embed(f, r.root);
    for (std::size_t i = 0; i < v.size(); ++i) CHECK(r.good[i] == v[i]);
    CHECK(cz_verify(r, f).passed());
}

TEST_CASE("two separated bumps give two cubes") {
    auto g = make_grid(-1, 11, 1.0 / 64);
    std::vector<double> v(g.cells, 0.0);
    for (std::size_t i = 0; i < g.cells; ++i) {
        double x = g.x(i);
        if ((x >= 0 && x < 0.25) || (x >= 10 && x < 10.25)) v[i] = 4.0;
    }
    GridFunction f(g, v);
    auto r = cz_decompose(f, 0.5);
    CHECK(r.root.x_lo == -16.0);
    REQUIRE(r.cubes.size() == 2);
    CHECK(r.cubes[0].lo <= 0.0);
    CHECK(r.cubes[0].hi >= 0.25);
    CHECK(r.cubes[1].lo <= 10.0);
    CHECK(r.cubes[1].hi >= 10.25);
    CHECK(r.cubes[0].hi <= r.cubes[1].lo);
    CHECK(r.cubes[0].mass == doctest::Approx(1.0));
    CHECK(cz_verify(r, f).passed());
}

TEST_CASE("amplification raises the threshold") {
    auto g = make_grid(-2, 2, 1.0 / 64);
    auto f = GridFunction::indicator(g, 0, 1);
    auto r = cz_decompose(f, 0.125, 1.0);
    CHECK(r.threshold == 0.25);
    REQUIRE(r.cubes.size() == 1);
    CHECK(r.cubes[0].hi == 2.0);
}

TEST_CASE("decomposition errors") {
    auto f = GridFunction::indicator(make_grid(0, 1, 0.1), 0, 0.5);
    CHECK_THROWS(cz_decompose(f, 1.0));
    auto h = GridFunction::indicator(make_grid(0.3, 1.3, 1.0 / 16), 0.5, 1.0);
    CHECK_THROWS(cz_decompose(h, 1.0));
    auto ok = GridFunction::indicator(make_grid(0, 1, 1.0 / 16), 0.5, 1.0);
    CHECK_THROWS(cz_decompose(ok, 0.0));
    CHECK_THROWS(cz_decompose(ok, 1.0, -1.0));
}

TEST_CASE("random step functions satisfy every invariant") {
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> level(-6, 4);
    auto g = make_grid(-8, 8, 1.0 / 64);
    for (int seed = 0; seed < 20; ++seed) {
        auto f = random_steps(rng, g);
        for (int k = 0; k < 5; ++k) {
            double lambda = std::exp2(level(rng));
            double amp = (k % 2) * 1.5;
            auto r = cz_decompose(f, lambda, amp);
            auto rep = cz_verify(r, f);
            CHECK_MESSAGE(rep.passed(), "seed ", seed, " lambda ", lambda);
            if (!rep.passed()) require_clean(rep);
        }
    }
}

TEST_CASE("json lists cubes") {
    auto g = make_grid(-2, 2, 1.0 / 64);
    auto f = GridFunction::indicator(g, 0, 1);
    auto r = cz_decompose(f, 0.25);
    auto j = to_json(r);
    CHECK(j["cubes"].size() == 1);
    CHECK(j["cubes"][0]["average"] == 0.5);
    auto rj = to_json(cz_verify(r, f));
    CHECK(rj["passed"] == true);
    CHECK(rj["checks"].size() > 10);
}
