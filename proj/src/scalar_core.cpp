#include "fraclab/scalar_core.hpp"

#include <cmath>
#include <numbers>

namespace fraclab {

namespace {

void check_order(double s) {
    if (!(s > 0.0 && s < 1.0)) {
        throw DomainError("s must lie in (0,1), got " + std::to_string(s));
    }
}

double cos_power(double t, double p) { return abs_pow(std::cos(t), p); }

double simpson_step(double p, double lo, double hi, double f_lo, double f_mid,
                    double f_hi, double whole, double tol, int depth) {
    const double mid = 0.5 * (lo + hi);
    const double lm = 0.5 * (lo + mid);
    const double rm = 0.5 * (mid + hi);
    const double f_lm = cos_power(lm, p);
    const double f_rm = cos_power(rm, p);
    const double left = (mid - lo) / 6.0 * (f_lo + 4.0 * f_lm + f_mid);
    const double right = (hi - mid) / 6.0 * (f_mid + 4.0 * f_rm + f_hi);
    const double diff = left + right - whole;
    if (depth <= 0 || std::fabs(diff) <= 15.0 * tol) {
        return left + right + diff / 15.0;
    }
    return simpson_step(p, lo, mid, f_lo, f_lm, f_mid, left, 0.5 * tol, depth - 1) +
           simpson_step(p, mid, hi, f_mid, f_rm, f_hi, right, 0.5 * tol, depth - 1);
}

}  // namespace

double circle_moment(double p, double rel_tol) {
    detail::check_exponent(p);
    // |cos| has period pi and is even about 0: integrate cos^p over [0, pi/2].
    const double hi = 0.5 * std::numbers::pi;
    const double f0 = cos_power(0.0, p);
    const double fm = cos_power(0.5 * hi, p);
    const double f1 = cos_power(hi, p);
    const double coarse = hi / 6.0 * (f0 + 4.0 * fm + f1);
    // Absolute budget scaled by the coarse estimate, i.e. a relative target.
    const double tol = rel_tol * coarse;
    const double quarter = simpson_step(p, 0.0, hi, f0, fm, f1, coarse, tol, 50);
    return 4.0 * quarter;
}

double compute_K(int dim, double s, double p) {
    check_order(s);
    detail::check_exponent(p);
    switch (dim) {
        case 1:
            return p * (1.0 - s) / 2.0;
        case 2:
            return p * (1.0 - s) / circle_moment(p);
        default:
            throw DomainError("dim must be 1 or 2, got " + std::to_string(dim));
    }
}

FracParams FracParams::make(int dim, double s, double p) {
    FracParams fp;
    fp.kappa = compute_K(dim, s, p);
    fp.dim = dim;
    fp.s = s;
    fp.p = p;
    return fp;
}

double phi_p(double t, double p) {
    detail::check_exponent(p);
    return phi_unchecked(t, p);
}

namespace {

// |1+u|^p - 1 - p u, without cancellation for small u.
double taylor_remainder(double u, double p) {
    if (std::fabs(u) < 0.5) return std::expm1(p * std::log1p(u)) - p * u;
    return abs_pow(1.0 + u, p) - 1.0 - p * u;
}

}  // namespace

double picone_gap(double a1, double a2, double b1, double b2, double p) {
    detail::check_exponent(p);
    if (!(a1 >= 0.0) || !(a2 >= 0.0)) {
        throw DomainError("picone_gap: a1, a2 must be non-negative");
    }
    if (!(b1 > 0.0) || !(b2 > 0.0)) {
        throw DomainError("picone_gap: b1, b2 must be positive");
    }
    // With r_i = a_i / b_i, d = b1 - b2, X = r2 d and Y = (r1 - r2) b1 the gap is
    //   [|X+Y|^p - |X|^p - p phi(X) Y] - phi(d) b1 [r1^p - r2^p - p r2^{p-1} (r1 - r2)],
    // two remainders that vanish exactly for proportional pairs.
    const double r1 = a1 / b1;
    const double r2 = a2 / b2;
    const double d = b1 - b2;
    const double x = r2 * d;
    const double y = (r1 - r2) * b1;
    const double first = x == 0.0 ? abs_pow(y, p) : abs_pow(x, p) * taylor_remainder(y / x, p);
    const double second = r2 == 0.0 ? abs_pow(r1, p) : abs_pow(r2, p) * taylor_remainder((r1 - r2) / r2, p);
    return first - phi_unchecked(d, p) * b1 * second;
}

}  // namespace fraclab
