#include <cmath>
#include <random>

#include "doctest.h"
#include "polymax/convolution.hpp"
#include "polymax/grid.hpp"
#include "polymax/pushforward.hpp"

using namespace polymax;

TEST_CASE("eta window shape") {
    for (double s = 0.0; s <= 5.0; s += 1.0 / 64) {
        double e = EtaWindow::eta(s);
        CHECK(e >= 0.0);
        CHECK(e <= 1.0);
        if (s >= 1.0 && s <= 2.0) CHECK(e == doctest::Approx(1.0).epsilon(1e-15));
        if (s <= 0.5 || s >= 4.0) CHECK(e == 0.0);
    }
    // Fine midpoint sum against the closed form 1/4 + 1 + 1.
    const int m = 200000;
    double sum = 0.0;
    for (int i = 0; i < m; ++i) sum += EtaWindow::eta(0.5 + (i + 0.5) * 3.5 / m) * 3.5 / m;
    CHECK(sum == doctest::Approx(EtaWindow::integral()).epsilon(1e-9));
    CHECK(EtaWindow::integral() == 2.25);
}

TEST_CASE("grid function construction") {
    auto g = make_grid(-2, 2, 0.25);
    CHECK(g.cells == 16);
    CHECK(g.x(0) == -1.875);
    CHECK_THROWS(make_grid(0, 1, 0.3));
    CHECK_THROWS(GridFunction(g, std::vector<double>(16, -1.0)));
    CHECK_THROWS(GridFunction(g, std::vector<double>(15, 1.0)));
    CHECK_THROWS(GridFunction(g, std::vector<double>(16, 1.0), 3.0));

    auto f = GridFunction::indicator(g, 0.1, 1.0);
    REQUIRE(f.exact_mass());
    CHECK(*f.exact_mass() == doctest::Approx(0.9).epsilon(1e-14));
    CHECK(f.interpolate(0.625) == doctest::Approx(1.0));
    CHECK(f.interpolate(-3.0) == 0.0);
    CHECK(f.interpolate(0.125) == doctest::Approx(0.6));
    auto z = GridFunction::zero(g);
    CHECK(z.mass() == 0.0);
    CHECK(f.scaled(3.0).mass() == doctest::Approx(2.7));
    CHECK(f.shifted(4).interpolate(1.625) == doctest::Approx(1.0));
}

TEST_CASE("deposit preserves mass and first moment") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> c(-3, 3), w(0, 0.4), m(0.1, 2);
    const double h = 1.0 / 64;
    for (int trial = 0; trial < 200; ++trial) {
        LatticeDeposit dep(h, -400, 400);
        double widths[3] = {w(rng), w(rng) * (trial % 3 == 0 ? 0.0 : 1.0), w(rng) * 0.01};
        double centre = c(rng), mass = m(rng);
        dep.add(centre, widths, 3, mass);
        auto out = dep.finish();
        double s = 0.0, s1 = 0.0;
        for (std::size_t k = 0; k < out.w.size(); ++k) {
            CHECK(out.w[k] >= -1e-15);
            s += out.w[k];
            s1 += out.w[k] * static_cast<double>(out.first + static_cast<std::int64_t>(k)) * h;
        }
        CHECK(s == doctest::Approx(mass).epsilon(1e-13));
        CHECK(s1 / s == doctest::Approx(centre).epsilon(1e-11));
    }
}

TEST_CASE("point deposit splits between neighbours") {
    LatticeDeposit dep(0.5, -10, 10);
    dep.add_point(0.75, 2.0);
    auto out = dep.finish();
    CHECK(out.at(1) == doctest::Approx(1.0));
    CHECK(out.at(2) == doctest::Approx(1.0));
    CHECK(out.mass() == doctest::Approx(2.0));
}

TEST_CASE("linear pushforward of a uniform box is the hat projection") {
    // P(t) = t on [0, 1] with density 1: weights h inside, h/2 at the two ends.
    auto p = parse_polynomial("t1", 1);
    const double h = 1.0 / 32;
    PushforwardSpec spec;
    spec.main = &p;
    auto out = pushforward(spec, {uniform_rule(0, 1, 64, 1.0)}, h, -100, 100);
    CHECK(out.at(0) == doctest::Approx(h / 2).epsilon(1e-12));
    CHECK(out.at(32) == doctest::Approx(h / 2).epsilon(1e-12));
    for (int k = 1; k < 32; ++k) CHECK(out.at(k) == doctest::Approx(h).epsilon(1e-12));
    CHECK(out.at(-1) == 0.0);
    CHECK(out.at(33) == 0.0);
}

TEST_CASE("pushforward of a polynomial against itself cancels") {
    auto p = parse_polynomial("t1^2*t2 + t1*t2^3", 2);
    PushforwardSpec spec;
    spec.main = &p;
    spec.comparison = &p;
    auto out = pushforward(spec, {eta_rule(32), eta_rule(32)}, 1.0 / 16, -8000, 8000);
    CHECK(out.total_variation() < 1e-12);
}

TEST_CASE("region filter splits the mass") {
    auto p = parse_polynomial("t1^2 + t2", 2);
    std::vector<AxisRule> axes{uniform_rule(0, 1, 64, 1.0), uniform_rule(0, 1, 64, 1.0)};
    PushforwardSpec all, above, below;
    all.main = above.main = below.main = &p;
    above.region = Region::GradientAbove;
    below.region = Region::GradientAtMost;
    above.region_poly = below.region_poly = &p;
    above.threshold = below.threshold = 1.5;
    double h = 1.0 / 64;
    auto a = pushforward(all, axes, h, -200, 200);
    auto b = pushforward(above, axes, h, -200, 200);
    auto c = pushforward(below, axes, h, -200, 200);
    CHECK(b.mass() + c.mass() == doctest::Approx(a.mass()).epsilon(1e-13));
    // |grad|^2 = 4 t1^2 + 1 <= 2.25 iff t1 <= sqrt(5) / 4.
    CHECK(c.mass() == doctest::Approx(std::sqrt(5.0) / 4).epsilon(3e-2));
}

TEST_CASE("clamped deposits stay inside the radius") {
    auto p = parse_polynomial("t1^3", 1);
    PushforwardSpec spec;
    spec.main = &p;
    spec.clamp_radius = 20.0;
    const double h = 0.5;
    auto out = pushforward(spec, {eta_rule(16)}, h, -200, 200);
    CHECK(out.first >= -40);
    CHECK(out.last() <= 40);
    CHECK(out.mass() == doctest::Approx(out.total_variation()));
}

TEST_CASE("node choice respects limits") {
    auto p = parse_polynomial("t1^4*t2^3", 2);
    std::vector<double> lo{0.5, 0.5}, hi{4, 4};
    NodePolicy policy;
    auto k = choose_nodes({&p}, lo, hi, 1.0 / 1024, policy);
    CHECK(k[0] >= policy.min_nodes);
    CHECK(k[1] >= policy.min_nodes);
    CHECK(k[0] * k[1] <= policy.budget);
    auto small = choose_nodes({&p}, lo, hi, 1e6, policy);
    CHECK(small == std::vector<int>{policy.min_nodes, policy.min_nodes});
    auto gb = gradient_bounds(parse_polynomial("t1^2*t2", 2), {0, 0}, {2, 3});
    CHECK(gb[0] == 12.0);
    CHECK(gb[1] == 4.0);
    CHECK(value_bound(parse_polynomial("t1^2 - 3*t2", 2), {0, 0}, {2, 3}) == 13.0);
}

TEST_CASE("convolution bank matches direct summation") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0, 1);
    auto g = make_grid(0, 1, 1.0 / 200);
    std::vector<double> a(200), b(200);
    for (auto& x : a) x = u(rng);
    for (auto& x : b) x = u(rng) * (u(rng) < 0.3);
    GridFunction fa(g, a), fb(g, b);
    ConvolutionBank bank({&fa, &fb});
    for (int len : {1, 7, 49, 300, 450}) {
        LatticeMeasure k;
        k.h = g.dx;
        k.first = -len / 3;
        k.w.resize(len);
        for (auto& x : k.w) x = u(rng) - 0.3;
        std::vector<std::vector<double>> out;
        bank.apply(k, out);
        REQUIRE(out.size() == 2);
        for (int f = 0; f < 2; ++f) {
            const auto& in = f == 0 ? a : b;
            for (int i = 0; i < 200; ++i) {
                double s = 0.0;
                for (int j = 0; j < len; ++j) {
                    int src = i - (static_cast<int>(k.first) + j);
                    if (src >= 0 && src < 200) s += k.w[j] * in[src];
                }
                CHECK(out[f][i] == doctest::Approx(s).epsilon(1e-10).scale(10));
            }
        }
    }
}
