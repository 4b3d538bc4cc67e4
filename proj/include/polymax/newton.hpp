#pragma once

#include <boost/rational.hpp>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "polymax/polynomial.hpp"

namespace polymax {

using Rational = boost::rational<std::int64_t>;

struct VertexData {
    Exponent vertex;
    std::size_t corner = 0;
    std::vector<IntVec> normals;
    std::int64_t d = 1;
    std::optional<Rational> beta;  // nullopt: single monomial, minimum over an empty set
    std::vector<int> zero_coords;
    std::vector<int> nonzero_coords;
    std::vector<int> axis_normals;  // per zero coordinate, index into normals or -1
    std::vector<Rational> gamma;    // per zero coordinate; empty if no zero coordinate or gamma_infinite
    bool gamma_infinite = false;
    IntVec witness;
    bool degenerate = false;
    std::vector<IntVec> coord_rows;  // cone numerators are coord_rows * q

    int dim() const { return static_cast<int>(vertex.size()); }
    bool has_zero_coords() const { return !zero_coords.empty(); }
    // Normals that are not axis normals of zero coordinates.
    std::vector<int> b_normals() const;
};

struct NewtonDiagram {
    int n = 0;
    std::vector<Exponent> support;
    std::vector<Exponent> corners;
    std::vector<IntVec> facets;
    std::vector<VertexData> vertices;
};

struct IndexDecomposition {
    std::size_t j = 0;
    int m = 0;
    std::int64_t N = 0;
    IntVec kbar;
    IntVec numerators;
    std::int64_t d = 1;
};

struct ScalingConstants {
    Rational cN_exponent;
    std::vector<std::vector<Rational>> sigma_slot;  // sigma_slot[m] omits slot m
    std::vector<Rational> sigma_zero;               // over B-normals
};

struct PartitionReport {
    std::int64_t q_max = 0;
    std::int64_t checked = 0;
    std::int64_t coverage_violations = 0;
    std::int64_t disjointness_violations = 0;
    std::int64_t lemma_violations = 0;
    std::int64_t reconstruction_violations = 0;
    std::vector<std::string> messages;  // first few violations

    std::int64_t total() const {
        return coverage_violations + disjointness_violations + lemma_violations + reconstruction_violations;
    }
};

NewtonDiagram build_diagram(const Polynomial& p);

// Cone coordinates times d, or nullopt when q lies outside the cone.
std::optional<IntVec> cone_numerators(const VertexData& v, const IntVec& q);
IntVec reconstruct(const VertexData& v, const IndexDecomposition& dec);
IndexDecomposition decompose_index(const NewtonDiagram& d, const IntVec& q);
std::vector<IndexDecomposition> all_decompositions(const NewtonDiagram& d, const IntVec& q);

// q = ((N or N + k_i) / d) n^(i) with slot m at N; nullopt if not integral.
std::optional<IntVec> slice_index(const VertexData& v, std::int64_t N, int m, const IntVec& kbar);
// q = (sum k_i e_{a_i} + sum l_b n_b) / d for zero-coordinate vertices; nullopt if not integral.
std::optional<IntVec> zero_coordinate_index(const VertexData& v, const IntVec& kbar, const IntVec& lbar);

bool in_T(const NewtonDiagram& d, std::size_t corner, const IntVec& q);

std::optional<Rational> beta_constant(const VertexData& v, const std::vector<Exponent>& support);
// Throws if the minimum is not positive; nullopt when every term lies in the zero-coordinate part.
std::optional<std::vector<Rational>> gamma_constant(const VertexData& v, const std::vector<Exponent>& support);
// (1/d) min over terms outside the zero-coordinate part of their total degree in the zero coordinates.
std::optional<Rational> diagonal_gamma(const VertexData& v, const std::vector<Exponent>& support);
ScalingConstants scaling_constants(const VertexData& v);

PartitionReport verify_partition(const NewtonDiagram& d, std::int64_t q_max);

nlohmann::json to_json(const NewtonDiagram& d);
std::string rational_string(const Rational& r);
double to_double(const Rational& r);

}  // namespace polymax
