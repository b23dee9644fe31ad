#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace fraclab {

/// Raised when an argument violates a documented precondition.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Fractional order s, integrability exponent p, spatial dimension and the
/// normalization constant K that makes K|u|^p_{W^{s,p}} tend to the local
/// p-Dirichlet energy as s -> 1.
struct FracParams {
    double s = 0.5;
    double p = 2.0;
    int dim = 1;
    double kappa = 0.5;

    /// Validates (dim, s, p) and fills kappa via compute_K.
    static FracParams make(int dim, double s, double p);

    double sp() const { return s * p; }
};

/// p(1-s) divided by the integral of |<w,e>|^p over the unit sphere S^{dim-1}.
/// dim = 1 uses the counting measure on {-1, +1}; dim = 2 integrates
/// |cos t|^p over [0, 2pi] adaptively to 1e-12 relative accuracy.
double compute_K(int dim, double s, double p);

/// Integral of |cos t|^p over [0, 2pi] by adaptive Simpson quadrature.
double circle_moment(double p, double rel_tol = 1e-12);

namespace detail {

inline void check_exponent(double p) {
    if (!(p > 1.0) || !std::isfinite(p)) {
        throw DomainError("p must lie in (1, inf), got " + std::to_string(p));
    }
}

}  // namespace detail

/// |t|^p with exact fast paths for the common integer exponents.
inline double abs_pow(double t, double p) {
    const double a = std::fabs(t);
    if (p == 2.0) return a * a;
    if (p == 3.0) return a * a * a;
    if (a == 0.0) return 0.0;
    return std::pow(a, p);
}

/// |t|^{p-2} t without the domain check; phi(0) = 0 for every p > 1.
inline double phi_unchecked(double t, double p) {
    if (p == 2.0) return t;
    if (p == 3.0) return std::fabs(t) * t;
    if (t == 0.0) return 0.0;
    const double m = std::pow(std::fabs(t), p - 1.0);
    return t > 0.0 ? m : -m;
}

/// The p-power nonlinearity |t|^{p-2} t. Defined as 0 at t = 0 for p < 2,
/// where the formula is indeterminate.
double phi_p(double t, double p);

/// Gap in the discrete Picone inequality:
///   |a1-a2|^p - |b1-b2|^{p-2}(b1-b2)(a1^p/b1^{p-1} - a2^p/b2^{p-1}).
/// Non-negative for a1, a2 >= 0 and b1, b2 > 0; zero iff (a1,a2) = k(b1,b2).
double picone_gap(double a1, double a2, double b1, double b2, double p);

}  // namespace fraclab
