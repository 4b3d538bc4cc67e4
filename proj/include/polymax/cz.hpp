#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "json.hpp"
#include "polymax/grid.hpp"

namespace polymax {

struct DyadicCube {
    std::int64_t first = 0;  // first cell on the root grid
    std::int64_t cells = 0;  // a power of two
    double lo = 0.0, hi = 0.0;
    double mass = 0.0;
    double average = 0.0;
    double parent_average = 0.0;
};

struct CZResult {
    double level = 0.0;          // lambda
    double amplification = 0.0;  // epsilon N
    double threshold = 0.0;      // 2^amplification * lambda
    GridSpec root;               // dyadic root interval [-2^k, 2^k) at the grid step of f
    std::vector<DyadicCube> cubes;
    GridFunction good;
    std::vector<double> bad;      // signed samples on the root grid
    std::vector<bool> in_omega;   // per root cell
    double omega_measure = 0.0;

    CZResult() : good(GridFunction::zero(GridSpec{0.0, 1.0, 0})) {}
};

// Samples of f placed on the root grid (zero outside the domain of f).
std::vector<double> embed(const GridFunction& f, const GridSpec& root);

// Dyadic stopping time at 2^amplification * lambda. The root is the smallest [-2^k, 2^k) containing
// supp f, doubled until its average is at most the threshold.
CZResult cz_decompose(const GridFunction& f, double lambda, double amplification = 0.0);

struct CZCheck {
    std::string name;
    bool passed = true;
    double measured = 0.0;  // worst value of the checked quantity
    double bound = 0.0;
};

struct CZReport {
    std::vector<CZCheck> checks;
    bool passed() const;
    std::size_t violations() const;
};

CZReport cz_verify(const CZResult& r, const GridFunction& f);

nlohmann::json to_json(const CZResult& r);
nlohmann::json to_json(const CZReport& r);

}  // namespace polymax
