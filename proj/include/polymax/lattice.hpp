#pragma once

#include <cstdint>
#include <vector>

#include "polymax/polynomial.hpp"

namespace polymax::lattice {

using Matrix = std::vector<IntVec>;

std::int64_t dot(const IntVec& a, const IntVec& b);
std::int64_t dot(const IntVec& a, const Exponent& b);
std::int64_t gcd_all(const IntVec& v);
IntVec primitive(const IntVec& v);

// Exact determinant of a square integer matrix (fraction-free elimination).
std::int64_t det(const Matrix& rows);
int rank(const Matrix& rows);

// Vector orthogonal to the n-1 rows of an (n-1) x n matrix, from signed cofactors.
IntVec cross(const Matrix& rows);

// Cramer numerators: det(M) * M^{-1} q for the matrix whose columns are `cols`.
IntVec cramer_numerators(const Matrix& cols, const IntVec& q, std::int64_t& determinant);

IntVec unit(int n, int i);
IntVec to_int(const Exponent& e);

}  // namespace polymax::lattice
