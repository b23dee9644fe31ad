#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include "fraclab/eigen_pair.hpp"
#include "fraclab/grid.hpp"
#include "fraclab/nonlocal_operator.hpp"

namespace fraclab {

struct SolveOpts {
    double tol = 1e-9;       ///< target for the sup-norm of the strong-form residual
    int max_iters = 50000;   ///< descent steps, or fixed-point sweeps per continuation step
    double step0 = 1.0;      ///< first trial step, in units of 1/(h * Jacobian bound)
    double armijo = 1e-4;    ///< sufficient-decrease constant
    std::optional<double> radius;  ///< divergence guard on E_h^{1/p}; derived when unset
    double relax = 0.5;      ///< fixed-point damping
    int t_steps = 4;         ///< continuation subdivisions of t in [0, 1]
    int memory = 8;          ///< L-BFGS history; 0 gives plain steepest descent

    void validate() const;
};

struct SolveReport {
    GridFn solution;
    double lambda = 0.0;
    double residual = 0.0;  ///< sup |L u - lambda phi_p(u) - f|
    int iterations = 0;
    double energy = 0.0;    ///< J_h at the returned solution
    bool converged = false;
    bool diverged = false;
    bool monotone = true;   ///< J_h never increased across an accepted step
};

class ConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// J_h(u) = E_h(u)/p - (lambda/p) h sum |v_i|^p - h sum f_i v_i.
double functional_J(const NonlocalWeights& w, double lambda, const GridFn& f, const GridFn& u);

/// sup_i |(L u)_i - lambda phi_p(v_i) - f_i|.
double residual_sup(const NonlocalWeights& w, double lambda, const GridFn& f, const GridFn& u);

/// Minimizes J_h (strictly convex for lambda below the first eigenvalue)
/// with Armijo-backtracked quasi-Newton descent, starting from `initial`
/// (zero when absent).
SolveReport solve_subcritical(const NonlocalWeights& w, double lambda, const GridFn& f,
                              const SolveOpts& opts,
                              const std::optional<GridFn>& initial = std::nullopt);

/// The solution map g -> u with L u = g. Throws ConvergenceError when the
/// descent stalls above opts.tol.
GridFn resolvent(const NonlocalWeights& w, const GridFn& g, const SolveOpts& opts,
                 const std::optional<GridFn>& initial = std::nullopt);

/// 10 E_h(u*)^{1/p} with u* the subcritical solution at 0.9 lambda1, scaled by
/// the blow-up rate (0.1 lambda1 / |lambda - lambda1|)^{1/(p-1)} when lambda
/// is closer to lambda1 than that (gap floored at 1e-3 lambda1).
double default_radius(const NonlocalWeights& w, double lambda, const GridFn& f,
                      const EigenPair& first, const SolveOpts& opts);

/// Continuation in t of the fixed point u = R(lambda phi_p(u) + t f) for
/// lambda between the first and second eigenvalues. The single unstable
/// direction (along the first eigenfunction) is solved by a scalar Newton
/// step; the complement uses the damped fixed-point sweep.
SolveReport solve_homotopy(const NonlocalWeights& w, double lambda, const GridFn& f,
                           const SolveOpts& opts, const EigenPair& first);

/// Same, computing the first eigenpair internally.
SolveReport solve_homotopy(const NonlocalWeights& w, double lambda, const GridFn& f,
                           const SolveOpts& opts);

/// Direct dense solve of (A - lambda I) v = f for p = 2. Throws
/// SingularMatrixError near a discrete eigenvalue.
SolveReport solve_linear(const NonlocalWeights& w, double lambda, const GridFn& f);

/// {lambda, s, p, n, residual, iterations, converged, diverged, energy}.
std::string report_json(const SolveReport& report, const NonlocalWeights& w);

}  // namespace fraclab
