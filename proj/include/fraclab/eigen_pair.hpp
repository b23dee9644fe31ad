#pragma once

#include "fraclab/grid.hpp"

namespace fraclab {

/// Eigenvalue estimate with its eigenfunction, normalized to lp_norm = 1 and
/// sign-fixed so that the node sum is positive.
struct EigenPair {
    double value = 0.0;
    GridFn fn;
    double residual = 0.0;  ///< sup |L fn - value * phi_p(fn)|
    int iterations = 0;
    bool converged = false;
};

}  // namespace fraclab
