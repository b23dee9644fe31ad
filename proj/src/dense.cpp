#include "fraclab/dense.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fraclab/scalar_core.hpp"

namespace fraclab {

double DenseMatrix::frobenius() const {
    double sum = 0.0;
    for (double v : data_) sum += v * v;
    return std::sqrt(sum);
}

std::vector<double> DenseMatrix::multiply(std::span<const double> x) const {
    std::vector<double> y(static_cast<std::size_t>(n_), 0.0);
    for (int i = 0; i < n_; ++i) {
        double acc = 0.0;
        for (int j = 0; j < n_; ++j) acc += (*this)(i, j) * x[static_cast<std::size_t>(j)];
        y[static_cast<std::size_t>(i)] = acc;
    }
    return y;
}

std::vector<double> solve_dense(DenseMatrix a, std::vector<double> rhs, double rel_pivot) {
    const int n = a.size();
    if (static_cast<int>(rhs.size()) != n) throw DomainError("solve_dense: size mismatch");
    const double threshold = rel_pivot * a.frobenius();
    for (int k = 0; k < n; ++k) {
        int piv = k;
        for (int i = k + 1; i < n; ++i) {
            if (std::fabs(a(i, k)) > std::fabs(a(piv, k))) piv = i;
        }
        if (!(std::fabs(a(piv, k)) >= threshold) || a(piv, k) == 0.0) {
            throw SingularMatrixError(a(piv, k));
        }
        if (piv != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(piv, j));
            std::swap(rhs[static_cast<std::size_t>(k)], rhs[static_cast<std::size_t>(piv)]);
        }
        for (int i = k + 1; i < n; ++i) {
            const double m = a(i, k) / a(k, k);
            if (m == 0.0) continue;
            for (int j = k; j < n; ++j) a(i, j) -= m * a(k, j);
            rhs[static_cast<std::size_t>(i)] -= m * rhs[static_cast<std::size_t>(k)];
        }
    }
    std::vector<double> x(static_cast<std::size_t>(n), 0.0);
    for (int i = n - 1; i >= 0; --i) {
        double acc = rhs[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j) acc -= a(i, j) * x[static_cast<std::size_t>(j)];
        x[static_cast<std::size_t>(i)] = acc / a(i, i);
    }
    return x;
}

SymmetricEigen jacobi_eigen(const DenseMatrix& input, double rel_tol, int max_sweeps) {
    const int n = input.size();
    DenseMatrix a = input;
    DenseMatrix v(n);
    for (int i = 0; i < n; ++i) v(i, i) = 1.0;

    const double target = rel_tol * input.frobenius();
    auto off_mass = [&] {
        double sum = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) sum += a(i, j) * a(i, j);
        return std::sqrt(sum);
    };

    int sweep = 0;
    for (; sweep < max_sweeps && off_mass() > target; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                // Rotation angle zeroing a(p,q) (Rutishauser's stable form).
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::fabs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < n; ++k) {
                    const double akp = a(k, p);
                    const double akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < n; ++k) {
                    const double apk = a(p, k);
                    const double aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < n; ++k) {
                    const double vkp = v(k, p);
                    const double vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) < a(j, j); });

    SymmetricEigen out;
    out.sweeps = sweep;
    for (int k : order) {
        out.values.push_back(a(k, k));
        std::vector<double> col(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) col[static_cast<std::size_t>(i)] = v(i, k);
        out.vectors.push_back(std::move(col));
    }
    return out;
}

}  // namespace fraclab
