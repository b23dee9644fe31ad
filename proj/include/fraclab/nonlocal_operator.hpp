#pragma once

#include <span>
#include <vector>

#include "fraclab/dense.hpp"
#include "fraclab/grid.hpp"
#include "fraclab/scalar_core.hpp"

namespace fraclab {

/// How the Gagliardo double integral is reduced to node sums.
enum class Quadrature {
    /// Point evaluation of the kernel at node pairs; the i = j cell is dropped
    /// and the exterior term integrates exactly over the complement of (a, b).
    /// First-order near the diagonal: the dropped cell costs O(h^{p-sp}).
    kNodal,
    /// Each node owns the cell [x_i - h/2, x_i + h/2]; the zero-valued endpoint
    /// nodes own everything outside [a + h/2, b - h/2]. Pair weights integrate
    /// |z|^{p-1-sp} over the distance band of each neighbor class (the own cell
    /// is folded into d = 1), so locally linear functions are integrated exactly.
    kCellCentered,
};

/// Kernel weights stored by distance class plus exterior absorption.
///
/// Discrete energy and operator:
///   E_h(u)   = sum_{i != j} pair_{|i-j|} |v_i - v_j|^p + 2 K h sum_i ext_i |v_i|^p
///   (L u)_i  = (2/h) sum_{j != i} pair_{|i-j|} phi_p(v_i - v_j) + 2 K ext_i phi_p(v_i)
/// so that L u = grad E_h / (p h).
struct NonlocalWeights {
    FracParams params;
    Grid1D grid;
    Quadrature rule;
    std::vector<double> pair;  ///< pair[d] for d = 1..n-1; pair[0] unused (0)
    std::vector<double> ext;   ///< ext[i], one per node

    int n() const { return grid.n(); }
    double p() const { return params.p; }
};

NonlocalWeights build_weights(const FracParams& params, const Grid1D& grid,
                              Quadrature rule = Quadrature::kCellCentered);

/// Closed form of the integral of |x - y|^{-(1+sp)} over y < lo or y > hi.
double exterior_coefficient(double x, double lo, double hi, double sp);

double energy(const NonlocalWeights& w, const GridFn& u);

/// E_h(u)^{1/p}.
double seminorm(const NonlocalWeights& w, const GridFn& u);

GridFn apply_operator(const NonlocalWeights& w, const GridFn& u);

/// Writes L v into out; v and out must both have length n.
void apply_into(const NonlocalWeights& w, std::span<const double> v, std::span<double> out);

/// Computes L v into out and returns E_h(v) from the same pair sweep
/// (|t|^p = phi_p(t) t).
double energy_and_apply(const NonlocalWeights& w, std::span<const double> v, std::span<double> out);

/// E_h(u) / (h sum |v_i|^p). Throws DomainError on u == 0.
double rayleigh(const NonlocalWeights& w, const GridFn& u);

/// Dense matrix of L for p = 2 (symmetric, positive diagonal).
DenseMatrix assemble_linear(const NonlocalWeights& w);

/// Infinity-norm bound on the Jacobian of v -> L v at v (Gershgorin).
/// For p = 2 this is independent of v.
double jacobian_bound(const NonlocalWeights& w, std::span<const double> v);

}  // namespace fraclab
