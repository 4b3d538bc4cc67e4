#pragma once

#include <complex>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "polymax/fit.hpp"
#include "polymax/newton.hpp"
#include "polymax/polynomial.hpp"
#include "polymax/pushforward.hpp"

namespace polymax {

// Where the eta-weighted t-integral is taken: the whole box [1/2, 4]^n, the part where the gradient of
// the comparison polynomial exceeds the level, or the part where it does not.
enum class MeasureRegion { Full, Nondegenerate, Degenerate };

std::string region_name(MeasureRegion r);

struct MeasureOptions {
    int bins_exponent = 14;              // bin width radius / 2^bins_exponent
    std::optional<double> bin_width;     // overrides bins_exponent
    double dilation = 1.0;               // values of both generators are multiplied by this
    NodePolicy policy{16, 1024, 1 << 16, 16.0, 1 << 22};
};

// Difference of the pushforwards of prod eta(t_i) dt (restricted to a region) under the rescaled
// polynomial and its comparison part.
struct OscMeasure {
    std::size_t vertex = 0;
    IntVec q;
    bool zero_coordinates = false;
    MeasureRegion region = MeasureRegion::Full;
    double level = 0.0;  // gradient level defining the region
    double dilation = 1.0;
    std::optional<Polynomial> main;        // rescaled polynomial
    std::optional<Polynomial> comparison;  // vertex monomial or zero-coordinate part
    bool vanishing = false;                // identical generators or empty region
    double radius = 0.0;                   // interval bound of |values| on the box, times dilation
    double bin_width = 0.0;
    LatticeMeasure density;                // signed masses on multiples of bin_width
    double region_mass = 0.0;              // eta mass of the region
    double tv_bound = 0.0;                 // 2 * region_mass
    double gradient_floor = 0.0;           // sampled min of |grad comparison| over the region, times dilation

    double mass() const { return density.mass(); }
    double total_variation() const { return density.total_variation(); }
    // Largest distance from 0 of the support of the histogram density (bins of width bin_width).
    double histogram_radius() const;
};

// Measure for P rescaled at q with the comparison chosen by the vertex type.
OscMeasure build_measure(const Polynomial& p, const VertexData& v, std::size_t j, const IntVec& q,
                         MeasureRegion region = MeasureRegion::Full, double level = 0.0,
                         const MeasureOptions& opts = {});

// Slice family of a vertex without zero coordinates; nullopt q gives the zero measure.
OscMeasure build_slice_measure(const Polynomial& p, const NewtonDiagram& d, std::size_t j, std::int64_t N, int m,
                               const IntVec& kbar, const MeasureOptions& opts = {});
// Zero-coordinate family at (kbar, lbar) with level 2^{-theta gamma.kbar}.
OscMeasure build_zero_measure(const Polynomial& p, const NewtonDiagram& d, std::size_t j, const IntVec& kbar,
                              const IntVec& lbar, MeasureRegion region, double theta = 0.25,
                              const MeasureOptions& opts = {});

// Smallest offset vector (by sum, then lexicographically, entries below d) giving an integral slice index.
std::optional<IntVec> first_integral_offset(const VertexData& v, std::int64_t N, int m);
// 2^{-sigma.kbar} for the slice scaling vector of slot m.
double slice_dilation(const VertexData& v, int m, const IntVec& kbar);
// 2^{-theta gamma.kbar}; 1 when gamma is unavailable.
double nondegenerate_level(const VertexData& v, const IntVec& kbar, double theta);

// Point masses moved to factor * x and split between the two neighbouring points of the lattice h.
LatticeMeasure resample(const LatticeMeasure& m, double factor, double h);
// Integral of |F_a - F_b| for the cumulative functions of two lattice measures (point masses).
double cdf_distance(const LatticeMeasure& a, const LatticeMeasure& b);
// Discrete transform sum_k w_k exp(-i xi k h).
std::complex<double> lattice_transform(const LatticeMeasure& m, double xi);

struct FourierOptions {
    int base_nodes = 8;         // Gauss-Legendre nodes per panel before phase resolution
    double oversample = 0.75;   // nodes per half period of the fastest local phase
    double tolerance = 1e-2;    // relative change allowed under node doubling
    double noise_floor = 1e-13;
    std::int64_t max_nodes = std::int64_t{1} << 27;
};

class FourierError : public std::runtime_error {
public:
    FourierError(const std::string& msg, double xi) : std::runtime_error(msg), xi_(xi) {}
    double xi() const { return xi_; }

private:
    double xi_;
};

// Small band: xi * radius in [small_lo, small_hi]. Large band: xi * gradient_floor in [large_lo, large_hi].
struct FrequencyBands {
    double small_lo = 1e-3, small_hi = 1e-1;
    double large_lo = 1.0, large_hi = 8.0;
    int per_band = 16;
};

struct FourierProfile {
    std::vector<double> xi;
    std::vector<std::complex<double>> value;  // integral of exp(-i xi x) d nu
    std::vector<double> magnitude;
    std::vector<double> change;             // |value - value at half the nodes|
    std::vector<std::int64_t> nodes;        // tensor nodes of the accepted rule
    std::vector<double> mean_value_bound;   // |xi| * integral |main - comparison| eta
    double radius = 0.0;
    double tv_bound = 0.0;
    bool vanishing = false;
};

std::vector<double> frequency_grid(const OscMeasure& m, const FrequencyBands& bands = {});
std::pair<double, double> small_band(const OscMeasure& m, const FrequencyBands& bands = {});
std::pair<double, double> large_band(const OscMeasure& m, const FrequencyBands& bands = {});
// Composite Gauss-Legendre over panels of each axis, nested so that panel node counts follow the local
// gradient bounds; doubles nodes until stable and throws FourierError otherwise.
FourierProfile fourier_transform(const OscMeasure& m, const std::vector<double>& xi, const FourierOptions& opts = {});

struct DecayFit {
    std::size_t points = 0;  // points above the noise floor used in the fit
    bool vanishing = false;
    bool tail_envelope = false;
    LineFit line;            // log |nu^| against log xi
    double origin_constant = 0.0;  // least squares |nu^| = C xi
};

// Fit over lo <= xi <= hi; needs 8 grid points there. With tail_envelope the magnitudes are replaced by
// their maximum over the larger frequencies of the band.
DecayFit decay_fit(const FourierProfile& p, double lo, double hi, double noise_floor = 1e-13,
                   bool tail_envelope = false);

// Integral of |nu(x - y) - nu(x)| for the histogram density; y = 0 gives 0.
double l1_modulus(const OscMeasure& m, double y);
// Same integral restricted to |x| >= cutoff.
double l1_shift_outside(const LatticeMeasure& m, double y, double cutoff);
// sqrt(2 (R + |y|) / pi * integral over the profile range of |exp(-i y xi) - 1|^2 |nu^|^2).
double plancherel_estimate(const FourierProfile& p, double y);

struct ShiftedTerm {
    IntVec kbar;
    bool defined = true;  // false when the slice index is not integral
    double dilation = 1.0;
    double radius = 0.0;  // histogram support radius of the dilated measure
    bool excluded = false;
    double value = 0.0;
};

struct ShiftedSumReport {
    double y = 0.0;
    std::vector<ShiftedTerm> terms;
    double sum = 0.0;
    std::size_t included = 0, excluded = 0;
    std::size_t excluded_nonzero = 0;  // must be 0
};

// Sum over kbar in {0..k_max}^{n-1} of the outside-shift integral of the dilated slice measures.
ShiftedSumReport shifted_sum_bound(const Polynomial& p, const NewtonDiagram& d, std::size_t j, std::int64_t N, int m,
                                   int k_max, double y, const MeasureOptions& opts = {});
// Offsets needed so that every dilated support radius drops below |y| / 2.
int shifted_sum_reach(const VertexData& v, int m, double radius, double y);

struct SublevelOptions {
    std::int64_t grid_points = std::int64_t{1} << 20;
    std::int64_t samples = std::int64_t{1} << 18;
    std::uint64_t seed = 1;
    double min_fraction = 1e-4;    // smallest measured fraction of the box used in the fit
    double max_fraction = 0.25;    // largest fraction used in the fit
    int levels = 48;
    double ladder_step = 0.25;     // octaves between successive levels
};

struct SublevelCurve {
    std::vector<double> level;
    std::vector<double> grid_measure;
    std::vector<double> sample_measure;
    double box_measure = 0.0;
    double gradient_min = 0.0, gradient_max = 0.0;  // over the grid
    bool fitted = false;
    LineFit fit;  // log measure against log level on the fitted range
};

// Measure of {t in [1/2, 4]^n : |grad P(t)| <= s} on a geometric ladder down from the gradient maximum.
SublevelCurve sublevel_measure(const Polynomial& p, const SublevelOptions& opts = {});
// Same at given levels.
SublevelCurve sublevel_measure(const Polynomial& p, const std::vector<double>& levels, const SublevelOptions& opts);

// Smallest k in 0..k_max with large-band slope <= -1 for the nondegenerate part at kbar = (k, ..., k), lbar = 0.
std::optional<int> empirical_k0(const Polynomial& p, const NewtonDiagram& d, std::size_t j, double theta, int k_max,
                                const MeasureOptions& mopts = {}, const FourierOptions& fopts = {},
                                const FrequencyBands& bands = {});

struct SliceFourierPoint {
    std::int64_t N = 0;
    IntVec kbar;
    double radius = 0.0;
    double gradient_floor = 0.0;
    double mass = 0.0;
    double total_variation = 0.0;
    bool vanishing = false;
    DecayFit small;  // raw magnitudes on the small band
    DecayFit large;  // tail envelope on the large band
};

struct VertexFourierDecay {
    std::size_t vertex = 0;
    int m = 0;
    double beta = 0.0;
    std::vector<SliceFourierPoint> points;
    bool fitted = false;  // false when fewer than three depths have a positive small-band constant
    LineFit constant_fit;  // log2 of the small-band constant against N
    double delta = 0.0;    // -slope
};

// Slice measures of a vertex without zero coordinates at slot m, N = n_min..n_max, offsets from
// first_integral_offset.
VertexFourierDecay vertex_fourier_decay(const Polynomial& p, const NewtonDiagram& d, std::size_t j,
                                        std::int64_t n_min, std::int64_t n_max, int m = 0,
                                        const MeasureOptions& mopts = {}, const FourierOptions& fopts = {},
                                        const FrequencyBands& bands = {});

nlohmann::json to_json(const OscMeasure& m);
nlohmann::json to_json(const VertexFourierDecay& v);
nlohmann::json to_json(const DecayFit& f);
nlohmann::json to_json(const SublevelCurve& c);

}  // namespace polymax
