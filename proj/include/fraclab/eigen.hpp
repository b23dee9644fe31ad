#pragma once

#include <optional>
#include <vector>

#include "fraclab/eigen_pair.hpp"
#include "fraclab/nonlocal_operator.hpp"
#include "fraclab/solver.hpp"

namespace fraclab {

/// Flips u so that sum_i u_i > 0. When the sum vanishes to rounding (odd
/// functions on a symmetric grid) the first non-negligible node is made
/// positive instead.
void sign_fix(GridFn& u);

/// Inverse-power iteration u <- normalize(R(phi_p(u))) from `start` (u = 1
/// when absent); stops when the Rayleigh quotient moves by at most opts.tol
/// relative. `history`, when given, receives the Rayleigh quotient of every
/// iterate.
EigenPair lambda1_solve(const NonlocalWeights& w, const SolveOpts& opts,
                        std::vector<double>* history = nullptr,
                        const std::optional<GridFn>& start = std::nullopt);

struct PathResult {
    double value = 0.0;             ///< max over the knots: upper bound for lambda2
    std::vector<double> rayleigh;   ///< per knot, endpoints included
    std::vector<GridFn> knots;
    int top = 0;                    ///< index of the maximal knot
    int iterations = 0;
    bool converged = false;
};

/// Mountain-pass bound for the second eigenvalue: a discrete path on the
/// L^p sphere from w1 to -w1, started through the normalized odd reflection
/// of w1 about the midpoint, is relaxed string-method style. Interior knots
/// descend perpendicular to the path, the maximal knot climbs along it, and
/// knots are redistributed by arc length on both sides of the maximum.
PathResult lambda2_path(const NonlocalWeights& w, const EigenPair& first, int knots, const SolveOpts& opts);

/// Dense p = 2 oracle: all eigenpairs by cyclic Jacobi, the m smallest returned.
std::vector<EigenPair> eigens_linear(const NonlocalWeights& w, int m);

/// {value, residual} (plus iterations and converged) for eigen artifacts.
std::string eigen_json(const EigenPair& pair, const NonlocalWeights& w);

}  // namespace fraclab
