#include "fraclab/nonlocal_operator.hpp"

#include <algorithm>
#include <cmath>

namespace fraclab {

double exterior_coefficient(double x, double lo, double hi, double sp) {
    return (std::pow(x - lo, -sp) + std::pow(hi - x, -sp)) / sp;
}

NonlocalWeights build_weights(const FracParams& params, const Grid1D& grid, Quadrature rule) {
    if (params.dim != 1) {
        throw DomainError("build_weights: only dim = 1 meshes are supported");
    }
    const int n = grid.n();
    const double h = grid.h();
    const double p = params.p;
    const double sp = params.sp();
    const double kappa = params.kappa;

    NonlocalWeights w{params, grid, rule, std::vector<double>(static_cast<std::size_t>(n), 0.0),
                      std::vector<double>(static_cast<std::size_t>(n), 0.0)};

    const double q = p - sp;  // > 0: p(1-s)
    for (int d = 1; d < n; ++d) {
        const double r = d * h;
        double weight = 0.0;
        if (rule == Quadrature::kNodal) {
            weight = kappa * h * h * std::pow(r, -(1.0 + sp));
        } else {
            const double lo = d == 1 ? 0.0 : (d - 0.5) * h;
            const double hi = (d + 0.5) * h;
            weight = kappa * h * (std::pow(hi, q) - std::pow(lo, q)) / q / std::pow(r, p);
        }
        w.pair[static_cast<std::size_t>(d)] = weight;
    }

    const double shift = rule == Quadrature::kNodal ? 0.0 : 0.5 * h;
    for (int i = 0; i < n; ++i) {
        w.ext[static_cast<std::size_t>(i)] =
            exterior_coefficient(grid.node(i), grid.a() + shift, grid.b() - shift, sp);
    }
    return w;
}

namespace {

void check_grid(const NonlocalWeights& w, const GridFn& u, const char* where) {
    require_same_grid(w.grid, u.grid(), where);
}

}  // namespace

double energy(const NonlocalWeights& w, const GridFn& u) {
    check_grid(w, u, "energy");
    const int n = w.n();
    const double p = w.p();
    const auto v = u.values();
    double pairs = 0.0;
    for (int i = 0; i < n; ++i) {
        const double vi = v[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < n; ++j) {
            pairs += w.pair[static_cast<std::size_t>(j - i)] * abs_pow(vi - v[static_cast<std::size_t>(j)], p);
        }
    }
    double outer = 0.0;
    for (int i = 0; i < n; ++i) {
        outer += w.ext[static_cast<std::size_t>(i)] * abs_pow(v[static_cast<std::size_t>(i)], p);
    }
    return 2.0 * pairs + 2.0 * w.params.kappa * w.grid.h() * outer;
}

double seminorm(const NonlocalWeights& w, const GridFn& u) {
    return std::pow(energy(w, u), 1.0 / w.p());
}

void apply_into(const NonlocalWeights& w, std::span<const double> v, std::span<double> out) {
    const int n = w.n();
    const double p = w.p();
    const double scale = 2.0 / w.grid.h();
    const double kappa2 = 2.0 * w.params.kappa;
    for (int i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] =
            kappa2 * w.ext[static_cast<std::size_t>(i)] * phi_unchecked(v[static_cast<std::size_t>(i)], p);
    }
    // phi_p is odd, so each unordered pair is evaluated once.
    for (int i = 0; i < n; ++i) {
        const double vi = v[static_cast<std::size_t>(i)];
        double acc = 0.0;
        for (int j = i + 1; j < n; ++j) {
            const double t = scale * w.pair[static_cast<std::size_t>(j - i)] *
                             phi_unchecked(vi - v[static_cast<std::size_t>(j)], p);
            acc += t;
            out[static_cast<std::size_t>(j)] -= t;
        }
        out[static_cast<std::size_t>(i)] += acc;
    }
}

double energy_and_apply(const NonlocalWeights& w, std::span<const double> v, std::span<double> out) {
    const int n = w.n();
    const double p = w.p();
    const double scale = 2.0 / w.grid.h();
    const double kappa2 = 2.0 * w.params.kappa;
    double outer = 0.0;
    for (int i = 0; i < n; ++i) {
        const double vi = v[static_cast<std::size_t>(i)];
        const double ph = phi_unchecked(vi, p);
        outer += w.ext[static_cast<std::size_t>(i)] * ph * vi;
        out[static_cast<std::size_t>(i)] = kappa2 * w.ext[static_cast<std::size_t>(i)] * ph;
    }
    double pairs = 0.0;
    for (int i = 0; i < n; ++i) {
        const double vi = v[static_cast<std::size_t>(i)];
        double acc = 0.0;
        for (int j = i + 1; j < n; ++j) {
            const double d = vi - v[static_cast<std::size_t>(j)];
            const double wph = w.pair[static_cast<std::size_t>(j - i)] * phi_unchecked(d, p);
            pairs += wph * d;
            acc += scale * wph;
            out[static_cast<std::size_t>(j)] -= scale * wph;
        }
        out[static_cast<std::size_t>(i)] += acc;
    }
    return 2.0 * pairs + kappa2 * w.grid.h() * outer;
}

GridFn apply_operator(const NonlocalWeights& w, const GridFn& u) {
    check_grid(w, u, "apply_operator");
    GridFn out(w.grid);
    apply_into(w, u.values(), out.values());
    return out;
}

double rayleigh(const NonlocalWeights& w, const GridFn& u) {
    const double mass = lp_norm_pow(u, w.p());
    if (!(mass > 0.0)) throw DomainError("rayleigh: u must not vanish identically");
    return energy(w, u) / mass;
}

DenseMatrix assemble_linear(const NonlocalWeights& w) {
    if (w.p() != 2.0) throw DomainError("assemble_linear: requires p = 2");
    const int n = w.n();
    const double scale = 2.0 / w.grid.h();
    DenseMatrix a(n);
    for (int i = 0; i < n; ++i) {
        double diag = 2.0 * w.params.kappa * w.ext[static_cast<std::size_t>(i)];
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double c = scale * w.pair[static_cast<std::size_t>(std::abs(i - j))];
            a(i, j) = -c;
            diag += c;
        }
        a(i, i) = diag;
    }
    return a;
}

double jacobian_bound(const NonlocalWeights& w, std::span<const double> v) {
    const int n = w.n();
    const double p = w.p();
    const double scale = 2.0 / w.grid.h();
    auto slope = [p](double t) {
        // d/dt phi_p(t) = (p-1)|t|^{p-2}; floored for p < 2 where it blows up at 0.
        const double a = std::max(std::fabs(t), 1e-12);
        return (p - 1.0) * (p == 2.0 ? 1.0 : std::pow(a, p - 2.0));
    };
    double bound = 0.0;
    for (int i = 0; i < n; ++i) {
        const double vi = v[static_cast<std::size_t>(i)];
        double row = 2.0 * w.params.kappa * w.ext[static_cast<std::size_t>(i)] * slope(vi);
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            row += 2.0 * scale * w.pair[static_cast<std::size_t>(std::abs(i - j))] *
                   slope(vi - v[static_cast<std::size_t>(j)]);
        }
        bound = std::max(bound, row);
    }
    return bound;
}

}  // namespace fraclab
