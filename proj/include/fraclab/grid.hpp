#pragma once

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace fraclab {

/// Uniform interior mesh on (a, b): x_i = a + i h, i = 1..n, h = (b-a)/(n+1).
/// The endpoints themselves are not unknowns; functions vanish there and on
/// the complement of (a, b).
class Grid1D {
public:
    Grid1D(double a, double b, int n);

    double a() const { return a_; }
    double b() const { return b_; }
    int n() const { return n_; }
    double h() const { return h_; }
    double length() const { return b_ - a_; }

    /// Node i in 0..n-1 (x_{i+1} in one-based notation).
    double node(int i) const { return a_ + (i + 1) * h_; }
    std::vector<double> nodes() const;

    bool operator==(const Grid1D&) const = default;

private:
    double a_;
    double b_;
    int n_;
    double h_;
};

/// build_grid(a, b, n).
inline Grid1D build_grid(double a, double b, int n) { return Grid1D(a, b, n); }

/// Node-valued function on a Grid1D, implicitly extended by zero outside the
/// interior nodes.
class GridFn {
public:
    explicit GridFn(const Grid1D& grid);
    GridFn(const Grid1D& grid, std::vector<double> values);

    static GridFn constant(const Grid1D& grid, double c);

    const Grid1D& grid() const { return grid_; }
    int size() const { return static_cast<int>(values_.size()); }

    std::span<const double> values() const { return values_; }
    std::span<double> values() { return values_; }

    double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return values_[static_cast<std::size_t>(i)]; }

    GridFn& operator+=(const GridFn& other);
    GridFn& operator-=(const GridFn& other);
    GridFn& operator*=(double c);

    double min() const;
    double max() const;
    double norm_inf() const;

private:
    Grid1D grid_;
    std::vector<double> values_;
};

GridFn operator+(GridFn lhs, const GridFn& rhs);
GridFn operator-(GridFn lhs, const GridFn& rhs);
GridFn operator*(double c, GridFn u);
GridFn operator-(GridFn u);

/// Throws DomainError unless both functions live on the same grid.
void require_same_grid(const Grid1D& g1, const Grid1D& g2, const char* where);

/// Rectangle-rule L^p(a,b) norm: (h sum |v_i|^p)^{1/p}.
double lp_norm(const GridFn& u, double p);

/// h * sum |v_i|^p, the p-th power of lp_norm without the root.
double lp_norm_pow(const GridFn& u, double p);

/// h * sum u_i v_i.
double inner(const GridFn& u, const GridFn& v);

struct SignSplit {
    GridFn plus;
    GridFn minus;
    double meas_pos;  ///< h * #{i : v_i > 0}
    double meas_neg;  ///< h * #{i : v_i < 0}
};

/// Positive and negative parts; zero nodes count toward neither set.
SignSplit sign_split(const GridFn& u);

/// Decimal rendering with 17 significant digits (round-trips doubles).
std::string format_real(double x);

/// Rows "x,value", one per interior node.
void write_csv(std::ostream& os, const GridFn& u);
void write_csv(const std::string& path, const GridFn& u);

/// Reads "x,value" rows back onto `grid`; the x column must match the nodes.
GridFn read_csv(const std::string& path, const Grid1D& grid);

}  // namespace fraclab
