#pragma once

#include <random>
#include <string>
#include <vector>

#include "polymax/grid.hpp"
#include "polymax/polynomial.hpp"

namespace polymax {

struct CorpusPolynomial {
    std::string text;
    int n = 0;

    Polynomial parse() const { return parse_polynomial(text, n); }
};

// Eight polynomials in two variables and four in three; degree at most 5, at most 5 terms.
const std::vector<CorpusPolynomial>& polynomial_corpus();
// Monomials with coefficient 1.
const std::vector<CorpusPolynomial>& monomial_corpus();

struct Lambda0Part {
    std::size_t source = 0;  // index into the corpus
    std::size_t vertex = 0;
    Polynomial part;
};

// Distinct zero-coordinate parts with non-constant gradient, in corpus and vertex order.
std::vector<Lambda0Part> lambda0_parts(const std::vector<CorpusPolynomial>& corpus);

// One to six random steps of height 0.1..10 anywhere on the grid, plus a unit spike at the centre cell.
GridFunction random_step_function(std::mt19937_64& rng, const GridSpec& g);

}  // namespace polymax
