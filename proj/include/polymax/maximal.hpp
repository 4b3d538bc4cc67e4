#pragma once

#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "polymax/grid.hpp"
#include "polymax/newton.hpp"
#include "polymax/polynomial.hpp"
#include "polymax/pushforward.hpp"

namespace polymax {

struct MaximalResult {
    GridSpec grid;
    std::vector<double> values;
    std::vector<IntVec> argmax;  // maximising index per grid point
    std::string index_name;      // "h_half_exponent", "q" or "interval"
    int truncation = 0;
    int min_nodes = 0;

    double sup() const;
    void write_csv(std::ostream& os) const;
};

using FunctionBatch = std::vector<const GridFunction*>;

// Kernel of t -> P(t) for the uniform probability on prod [lo_i, hi_i], on the lattice of grid g.
LatticeMeasure box_kernel(const Polynomial& p, const std::vector<double>& lo, const std::vector<double>& hi,
                          const GridSpec& g, const NodePolicy& policy);
// Kernel of t -> P(t) under prod eta(t_i) dt on [1/2, 4]^n (unnormalised, total mass 2.25^n).
// With a comparison polynomial the result is push(P) - push(comparison) on a shared tensor rule.
LatticeMeasure eta_kernel(const Polynomial& p, const Polynomial* comparison, const GridSpec& g,
                          const NodePolicy& policy);

// Eta tensor rule with node counts suited to every polynomial in polys.
std::vector<AxisRule> eta_axes(const std::vector<const Polynomial*>& polys, const GridSpec& g, const NodePolicy& policy);
LatticeMeasure eta_pushforward(const Polynomial& p, const std::vector<AxisRule>& axes, const GridSpec& g);
// push(P) and push(comparison) on one shared tensor rule.
std::pair<LatticeMeasure, LatticeMeasure> eta_kernel_pair(const Polynomial& p, const Polynomial& comparison,
                                                          const GridSpec& g, const NodePolicy& policy);

// sup over h_i = 2^{-i_i/2}, i_i = 0..2K, of the average of f(x - P(t)) over [0, h]^n.
MaximalResult maximal_continuous(const GridFunction& f, const Polynomial& p, int h_grid_size,
                                 const NodePolicy& policy = {});
std::vector<MaximalResult> maximal_continuous(const FunctionBatch& fs, const Polynomial& p, int h_grid_size,
                                              const NodePolicy& policy = {});

enum class DyadicForm {
    Box,  // average over prod [2^{-q_i-1}, 2^{-q_i}]
    Eta   // integral of f(x - P(2^{-q} t)) prod eta(t_i) dt
};

MaximalResult maximal_dyadic(const GridFunction& f, const Polynomial& p, int q_max, DyadicForm form = DyadicForm::Box,
                             const NodePolicy& policy = {});
std::vector<MaximalResult> maximal_dyadic(const FunctionBatch& fs, const Polynomial& p, int q_max, DyadicForm form,
                                          const NodePolicy& policy = {});

// Uncentred maximal function over unions of whole cells containing x.
MaximalResult hardy_littlewood(const GridFunction& f);

struct DominationReport {
    double max_ratio = 0.0;   // max of continuous / HL where HL > 0
    double max_excess = 0.0;  // max of continuous - 2 HL
    double tolerance = 0.0;
    std::size_t violations = 0;
    bool passed = true;
};

// Checks continuous(f) <= 2 (1 + rel_tol) HL(f) pointwise for a monomial with positive coefficient.
DominationReport monomial_domination_check(const GridFunction& f, const Polynomial& p, int h_grid_size,
                                           double rel_tol = 5e-2, const NodePolicy& policy = {});
DominationReport domination_report(const MaximalResult& op, const MaximalResult& hl, double rel_tol);

// Eta-smoothed sup over q in S(j), the comparison sup (vertex monomial, or the zero-coordinate part
// evaluated with fewer parameters) and the remainder sup of |<f, push(P) - push(comparison)>|.
struct ConeRestrictedResult {
    std::size_t vertex = 0;
    bool zero_coordinates = false;
    std::size_t indices = 0;  // number of q visited
    MaximalResult restricted;
    MaximalResult comparison;
    MaximalResult remainder;
};

ConeRestrictedResult maximal_cone_restricted(const GridFunction& f, const Polynomial& p, const NewtonDiagram& d,
                                             std::size_t j, int q_max, const NodePolicy& policy = {});
// One pass over {0..q_max}^n for all vertices and all functions: result[f][j].
std::vector<std::vector<ConeRestrictedResult>> maximal_cone_restricted_all(const FunctionBatch& fs,
                                                                           const Polynomial& p,
                                                                           const NewtonDiagram& d, int q_max,
                                                                           const NodePolicy& policy = {});

// Polynomial obtained by keeping only the variables listed in keep (other exponents must be zero).
Polynomial restrict_variables(const Polynomial& p, const std::vector<int>& keep);

// Sup over q in S(j) of the zero-coordinate comparison, computed with the reduced polynomial in the
// nonzero coordinates and the eta mass 2.25 per dropped coordinate.
MaximalResult zero_part_reduced(const GridFunction& f, const Polynomial& p, const NewtonDiagram& d, std::size_t j,
                                int q_max, const NodePolicy& policy = {});
// Same quantity from a full n-dimensional quadrature of the zero-coordinate part.
MaximalResult zero_part_direct(const GridFunction& f, const Polynomial& p, const NewtonDiagram& d, std::size_t j,
                               int q_max, const NodePolicy& policy = {});

// Visits every q in {0..q_max}^n in odometer order (first coordinate fastest).
void for_each_index(int n, int q_max, const std::function<void(const IntVec&)>& visit);

}  // namespace polymax
