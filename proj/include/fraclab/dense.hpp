#pragma once

#include <span>
#include <vector>

namespace fraclab {

/// Row-major square matrix; just enough for the p = 2 direct paths.
class DenseMatrix {
public:
    explicit DenseMatrix(int n = 0) : n_(n), data_(static_cast<std::size_t>(n) * n, 0.0) {}

    int size() const { return n_; }
    double& operator()(int i, int j) { return data_[index(i, j)]; }
    double operator()(int i, int j) const { return data_[index(i, j)]; }

    double frobenius() const;
    std::vector<double> multiply(std::span<const double> x) const;

private:
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * static_cast<std::size_t>(n_) + static_cast<std::size_t>(j);
    }
    int n_;
    std::vector<double> data_;
};

/// Thrown by solve_dense when a pivot falls below the singularity threshold.
class SingularMatrixError : public std::exception {
public:
    explicit SingularMatrixError(double pivot) : pivot_(pivot) {}
    const char* what() const noexcept override { return "matrix is numerically singular"; }
    double pivot() const { return pivot_; }

private:
    double pivot_;
};

/// Gaussian elimination with partial pivoting. Throws SingularMatrixError
/// when |pivot| < rel_pivot * ||A||_F.
std::vector<double> solve_dense(DenseMatrix a, std::vector<double> rhs, double rel_pivot = 1e-12);

struct SymmetricEigen {
    std::vector<double> values;                ///< ascending
    std::vector<std::vector<double>> vectors;  ///< unit l2 columns, vectors[k][i]
    int sweeps = 0;
};

/// Cyclic Jacobi rotations until the off-diagonal Frobenius mass drops below
/// rel_tol * ||A||_F. Eigenpairs sorted by ascending eigenvalue.
SymmetricEigen jacobi_eigen(const DenseMatrix& a, double rel_tol = 1e-14, int max_sweeps = 100);

}  // namespace fraclab
