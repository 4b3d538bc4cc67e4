#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "polymax/fit.hpp"
#include "polymax/grid.hpp"
#include "polymax/maximal.hpp"
#include "polymax/newton.hpp"

namespace polymax {

enum class TestKind { Indicator, BumpSum, DeltaLike };

std::string kind_name(TestKind k);

struct Bump {
    double center = 0.0;
    double width = 1.0;
    double height = 1.0;
};

struct TestFunction {
    TestKind kind = TestKind::Indicator;
    std::string name;
    std::vector<Bump> parts;
    GridFunction f{GridSpec{}, {}};
    double mass = 0.0;  // exact mass of the realised grid function
};

// 1 on [a, b] with covered-fraction cells.
TestFunction indicator_function(const GridSpec& g, double a, double b);
// Sum of h cos^2(pi (x - c) / w) on |x - c| < w / 2; each bump has mass h w / 2.
TestFunction bump_sum(const GridSpec& g, const std::vector<Bump>& bumps);
// mass / width on the cells of [center - width/2, center + width/2); width is a multiple of dx, at least 2 dx.
TestFunction delta_like(const GridSpec& g, double center, double width, double mass = 1.0);
// count functions cycling indicator, bump sum, bump sum, delta-like; all supported in [-5, 0].
std::vector<TestFunction> standard_corpus(const GridSpec& g, std::uint64_t seed = 1, int count = 20);
TestFunction scaled(const TestFunction& t, double c);
// Shift by whole cells.
TestFunction translated(const TestFunction& t, long cells);

// Geometric alpha grid of points values spanning [lo, hi] * sup.
struct AlphaSpec {
    int points = 64;
    double lo = 1e-3;
    double hi = 1.5;
};

std::vector<double> alpha_grid(double sup, const AlphaSpec& spec = {});

struct DistributionCurve {
    std::vector<double> alpha;
    std::vector<double> measure;  // dx * #{cells with value > alpha}
};

DistributionCurve distribution_function(const MaximalResult& r, const std::vector<double>& alpha);
DistributionCurve distribution_function(const GridSpec& g, const std::vector<double>& values,
                                        const std::vector<double>& alpha);

struct WeakValue {
    double W = 0.0;           // max over alpha of alpha |{Op f > alpha}| / mass
    double alpha_star = 0.0;  // maximising alpha
    double mass = 0.0;
    double chebyshev = 0.0;   // sup Op f * |supp Op f| / mass, an upper bound for W
    DistributionCurve curve;
};

WeakValue weak_type_functional(const MaximalResult& r, double mass, const AlphaSpec& alpha = {});
WeakValue weak_type_functional(const GridSpec& g, const std::vector<double>& values, double mass,
                               const AlphaSpec& alpha = {});

// Sup over the indices q of one group of |<f, push(P(2^-q .)) - push(comparison(2^-q .))>|. Depth groups
// collect q in S(j) with decomposition depth N; axis groups collect q in S(j) whose coefficient on the
// axis normal of zero coordinate `axis` has integer part N.
struct SlicePiece {
    std::size_t vertex = 0;
    int axis = -1;  // -1 for depth groups
    std::int64_t N = 0;
    std::size_t indices = 0;
    std::vector<double> values;
};

struct VertexPieces {
    std::vector<SlicePiece> depth;                // ordered by (vertex, N)
    std::vector<SlicePiece> axis;                 // ordered by (vertex, axis, N)
    std::vector<std::vector<double>> restricted;  // per vertex: sup over S(j) of <f, push(P(2^-q .))>
};

// One pass over {0..q_max}^n for every function.
std::vector<VertexPieces> slice_pieces(const FunctionBatch& fs, const Polynomial& p, const NewtonDiagram& d,
                                       int q_max, const NodePolicy& policy = {});

struct SliceDecay {
    std::size_t vertex = 0;
    int axis = -1;
    bool zero_coordinates = false;
    std::vector<std::int64_t> N;
    std::vector<double> W;
    std::vector<std::size_t> indices;
    bool fitted = false;  // false when fewer than three groups carry a nonzero functional
    LineFit fit;          // log2 W against N
    double delta = 0.0;   // -slope
    double constant = 0.0;  // 2^intercept
};

// Per-group functionals of one function; groups whose pieces vanish identically are skipped in the fit.
std::vector<SliceDecay> slice_decay(const std::vector<SlicePiece>& pieces, const GridSpec& g, double mass,
                                    const AlphaSpec& alpha = {});
// Fits log2 W against N over the groups with W > 0.
void fit_decay(SliceDecay& s);

struct SweepOptions {
    int h_grid = 4;  // continuous operator radii 2^{-i/2}, i = 0..2 h_grid
    int q_max = 0;   // 0 picks 16 for n <= 2 and 10 otherwise
    NodePolicy policy{};
    AlphaSpec alpha{};
    std::vector<double> scales{1e-3, 1e3};
    std::vector<long> shifts{-977, 1531};  // in cells
    std::vector<int> width_cells{2, 4, 8, 16, 32, 64, 128};
    double stability = 0.2;
};

int default_q_max(int n);

struct CorpusEntry {
    std::string name;
    TestKind kind = TestKind::Indicator;
    double W = 0.0;
    double scale_deviation = 0.0;      // max relative change of W under f -> c f
    double translate_deviation = 0.0;  // max relative change of W under shifts
};

struct VertexWeak {
    std::size_t vertex = 0;
    bool zero_coordinates = false;
    double W = 0.0;  // max over the corpus of the functional of the cone-restricted operator
};

struct WeakTypeReport {
    std::string polynomial;
    int q_max = 0;
    std::vector<CorpusEntry> corpus;
    double W = 0.0;  // max over the corpus
    double W_min = 0.0, W_median = 0.0;
    double spread = 0.0;  // max |W_f / median - 1|, descriptive
    double half_W_first = 0.0, half_W_second = 0.0;  // maxima over the first and second half of the corpus
    double corpus_deviation = 0.0;                   // |half_W_first / half_W_second - 1|
    double max_scale_deviation = 0.0;
    double max_translate_deviation = 0.0;
    std::vector<int> width_cells;
    std::vector<double> width_W;
    bool width_blowup = false;  // W increases at every step as the width shrinks, by more than the stability margin overall
    std::vector<VertexWeak> vertices;
    std::vector<SliceDecay> slices;       // per vertex, per-depth maxima over the corpus
    std::vector<SliceDecay> axis_slices;  // per zero coordinate of zero-coordinate vertices

    bool scale_invariant() const { return max_scale_deviation <= 1e-12; }
    bool corpus_stable(double tol) const { return corpus_deviation <= tol && max_translate_deviation <= tol; }
    // Every vertex whose pieces do not vanish identically has a fitted positive rate.
    bool depth_decay() const;
    bool axis_decay() const;
    void write_slice_csv(std::ostream& os) const;
};

WeakTypeReport stability_sweep(const Polynomial& p, const std::vector<TestFunction>& corpus,
                               const SweepOptions& opts = {});

nlohmann::json to_json(const WeakTypeReport& r);

}  // namespace polymax
