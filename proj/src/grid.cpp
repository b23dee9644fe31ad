#include "fraclab/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "fraclab/scalar_core.hpp"

namespace fraclab {

Grid1D::Grid1D(double a, double b, int n) : a_(a), b_(b), n_(n), h_(0.0) {
    if (!std::isfinite(a) || !std::isfinite(b) || !(a < b)) {
        throw DomainError("grid: require a < b");
    }
    if (n < 1) {
        throw DomainError("grid: require n >= 1, got " + std::to_string(n));
    }
    h_ = (b - a) / (n + 1);
}

std::vector<double> Grid1D::nodes() const {
    std::vector<double> x(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) x[static_cast<std::size_t>(i)] = node(i);
    return x;
}

GridFn::GridFn(const Grid1D& grid)
    : grid_(grid), values_(static_cast<std::size_t>(grid.n()), 0.0) {}

GridFn::GridFn(const Grid1D& grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
    if (static_cast<int>(values_.size()) != grid.n()) {
        throw DomainError("GridFn: value count " + std::to_string(values_.size()) +
                          " does not match n = " + std::to_string(grid.n()));
    }
    for (double v : values_) {
        if (!std::isfinite(v)) throw DomainError("GridFn: non-finite value");
    }
}

GridFn GridFn::constant(const Grid1D& grid, double c) {
    return GridFn(grid, std::vector<double>(static_cast<std::size_t>(grid.n()), c));
}

GridFn& GridFn::operator+=(const GridFn& other) {
    require_same_grid(grid_, other.grid_, "GridFn::operator+=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    return *this;
}

GridFn& GridFn::operator-=(const GridFn& other) {
    require_same_grid(grid_, other.grid_, "GridFn::operator-=");
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
    return *this;
}

GridFn& GridFn::operator*=(double c) {
    for (double& v : values_) v *= c;
    return *this;
}

double GridFn::min() const { return *std::min_element(values_.begin(), values_.end()); }
double GridFn::max() const { return *std::max_element(values_.begin(), values_.end()); }

double GridFn::norm_inf() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::fabs(v));
    return m;
}

GridFn operator+(GridFn lhs, const GridFn& rhs) { return lhs += rhs; }
GridFn operator-(GridFn lhs, const GridFn& rhs) { return lhs -= rhs; }
GridFn operator*(double c, GridFn u) { return u *= c; }
GridFn operator-(GridFn u) { return u *= -1.0; }

void require_same_grid(const Grid1D& g1, const Grid1D& g2, const char* where) {
    if (!(g1 == g2)) throw DomainError(std::string(where) + ": grid mismatch");
}

double lp_norm_pow(const GridFn& u, double p) {
    if (!(p >= 1.0)) throw DomainError("lp_norm: require p >= 1");
    double sum = 0.0;
    for (double v : u.values()) sum += abs_pow(v, p);
    return u.grid().h() * sum;
}

double lp_norm(const GridFn& u, double p) { return std::pow(lp_norm_pow(u, p), 1.0 / p); }

double inner(const GridFn& u, const GridFn& v) {
    require_same_grid(u.grid(), v.grid(), "inner");
    double sum = 0.0;
    for (int i = 0; i < u.size(); ++i) sum += u[i] * v[i];
    return u.grid().h() * sum;
}

SignSplit sign_split(const GridFn& u) {
    SignSplit out{GridFn(u.grid()), GridFn(u.grid()), 0.0, 0.0};
    int pos = 0;
    int neg = 0;
    for (int i = 0; i < u.size(); ++i) {
        const double v = u[i];
        if (v > 0.0) {
            out.plus[i] = v;
            ++pos;
        } else if (v < 0.0) {
            out.minus[i] = -v;
            ++neg;
        }
    }
    out.meas_pos = u.grid().h() * pos;
    out.meas_neg = u.grid().h() * neg;
    return out;
}

std::string format_real(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_csv(std::ostream& os, const GridFn& u) {
    const Grid1D& g = u.grid();
    for (int i = 0; i < u.size(); ++i) {
        os << format_real(g.node(i)) << ',' << format_real(u[i]) << '\n';
    }
}

void write_csv(const std::string& path, const GridFn& u) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path + " for writing");
    write_csv(os, u);
}

GridFn read_csv(const std::string& path, const Grid1D& grid) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open " + path);
    std::vector<double> values;
    std::string line;
    int row = 0;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        const auto comma = line.find(',');
        if (comma == std::string::npos) {
            throw std::runtime_error(path + ": malformed row " + std::to_string(row + 1));
        }
        const double x = std::stod(line.substr(0, comma));
        const double v = std::stod(line.substr(comma + 1));
        if (row >= grid.n() || std::fabs(x - grid.node(row)) > 1e-9 * (1.0 + std::fabs(x))) {
            throw std::runtime_error(path + ": row " + std::to_string(row + 1) +
                                     " does not match the grid nodes");
        }
        values.push_back(v);
        ++row;
    }
    if (row != grid.n()) {
        throw std::runtime_error(path + ": expected " + std::to_string(grid.n()) + " rows, got " +
                                 std::to_string(row));
    }
    return GridFn(grid, std::move(values));
}

}  // namespace fraclab
