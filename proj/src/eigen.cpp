#include "fraclab/eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <json.hpp>

namespace fraclab {

namespace {

double eigen_residual(const NonlocalWeights& w, const GridFn& u, double value) {
    const GridFn lu = apply_operator(w, u);
    double m = 0.0;
    for (int i = 0; i < u.size(); ++i) {
        m = std::max(m, std::fabs(lu[i] - value * phi_unchecked(u[i], w.p())));
    }
    return m;
}

void normalize_lp(GridFn& u, double p) {
    const double norm = lp_norm(u, p);
    if (!(norm > 0.0)) throw DomainError("normalize: zero function");
    u *= 1.0 / norm;
}

}  // namespace

void sign_fix(GridFn& u) {
    double sum = 0.0;
    double abs_sum = 0.0;
    double peak = 0.0;
    for (double v : u.values()) {
        sum += v;
        abs_sum += std::fabs(v);
        peak = std::max(peak, std::fabs(v));
    }
    if (std::fabs(sum) > 1e-10 * abs_sum) {
        if (sum < 0.0) u *= -1.0;
        return;
    }
    for (double v : u.values()) {
        if (std::fabs(v) > 1e-8 * peak) {
            if (v < 0.0) u *= -1.0;
            return;
        }
    }
}

EigenPair lambda1_solve(const NonlocalWeights& w, const SolveOpts& opts, std::vector<double>* history,
                        const std::optional<GridFn>& start) {
    opts.validate();
    const double p = w.p();
    GridFn u = start ? *start : GridFn::constant(w.grid, 1.0);
    require_same_grid(u.grid(), w.grid, "lambda1_solve");
    normalize_lp(u, p);
    double value = rayleigh(w, u);
    if (history) history->assign(1, value);

    EigenPair out{value, u};
    std::optional<GridFn> warm;
    int it = 0;
    for (; it < opts.max_iters; ++it) {
        GridFn g(w.grid);
        for (int i = 0; i < u.size(); ++i) g[i] = phi_unchecked(u[i], p);
        SolveReport r = solve_subcritical(w, 0.0, g, opts, warm);
        warm = r.solution;
        GridFn next = std::move(r.solution);
        normalize_lp(next, p);
        const double next_value = rayleigh(w, next);
        if (history) history->push_back(next_value);
        const bool settled = std::fabs(next_value - value) <= opts.tol * value;
        u = std::move(next);
        value = next_value;
        if (settled) {
            out.converged = true;
            ++it;
            break;
        }
    }
    sign_fix(u);
    out.value = value;
    out.residual = eigen_residual(w, u, value);
    out.fn = std::move(u);
    out.iterations = it;
    return out;
}

namespace {

struct KnotState {
    double value = 0.0;
    std::vector<double> grad;  // h-metric gradient of the Rayleigh quotient
};

KnotState knot_state(const NonlocalWeights& w, const GridFn& u) {
    const int n = w.n();
    const double p = w.p();
    KnotState st;
    st.grad.resize(static_cast<std::size_t>(n));
    const double e = energy_and_apply(w, u.values(), st.grad);
    const double mass = lp_norm_pow(u, p);
    st.value = e / mass;
    for (int i = 0; i < n; ++i) {
        auto& g = st.grad[static_cast<std::size_t>(i)];
        g = p * (g - st.value * phi_unchecked(u[i], p)) / mass;
    }
    return st;
}

double l2_distance(const GridFn& a, const GridFn& b) {
    double sum = 0.0;
    for (int i = 0; i < a.size(); ++i) sum += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(sum);
}

// Redistributes knots lo+1..hi-1 at equal chord length along the polyline
// through knots lo..hi, then projects them back onto the sphere.
void redistribute(std::vector<GridFn>& knots, int lo, int hi, double p) {
    if (hi - lo < 2) return;
    std::vector<double> arc(static_cast<std::size_t>(hi - lo + 1), 0.0);
    for (int k = lo + 1; k <= hi; ++k) {
        arc[static_cast<std::size_t>(k - lo)] =
            arc[static_cast<std::size_t>(k - lo - 1)] + l2_distance(knots[static_cast<std::size_t>(k)],
                                                                    knots[static_cast<std::size_t>(k - 1)]);
    }
    const double total = arc.back();
    if (!(total > 0.0)) return;
    const std::vector<GridFn> old(knots.begin() + lo, knots.begin() + hi + 1);
    std::size_t seg = 0;
    for (int k = lo + 1; k < hi; ++k) {
        const double target = total * (k - lo) / (hi - lo);
        while (seg + 1 < arc.size() - 1 && arc[seg + 1] < target) ++seg;
        const double len = arc[seg + 1] - arc[seg];
        const double t = len > 0.0 ? (target - arc[seg]) / len : 0.0;
        GridFn u = (1.0 - t) * old[seg] + t * old[seg + 1];
        normalize_lp(u, p);
        knots[static_cast<std::size_t>(k)] = std::move(u);
    }
}

}  // namespace

PathResult lambda2_path(const NonlocalWeights& w, const EigenPair& first, int knots, const SolveOpts& opts) {
    opts.validate();
    if (knots < 3) throw DomainError("lambda2_path: need at least 3 knots");
    require_same_grid(w.grid, first.fn.grid(), "lambda2_path");
    const int n = w.n();
    const double p = w.p();
    const Grid1D& g = w.grid;

    const GridFn& w1 = first.fn;
    GridFn odd(g);
    const double mid = 0.5 * (g.a() + g.b());
    for (int i = 0; i < n; ++i) {
        const double x = g.node(i);
        const double side = std::fabs(x - mid) <= 1e-12 * g.length() ? 0.0 : (x < mid ? 1.0 : -1.0);
        odd[i] = side * w1[i];
    }
    if (lp_norm_pow(odd, p) == 0.0) throw DomainError("lambda2_path: degenerate reflection");
    normalize_lp(odd, p);

    PathResult out;
    out.knots.reserve(static_cast<std::size_t>(knots));
    for (int k = 0; k < knots; ++k) {
        const double theta = std::numbers::pi * k / (knots - 1);
        GridFn u = std::cos(theta) * w1 + std::sin(theta) * odd;
        if (k == knots - 1) u = -w1;
        if (k == 0) u = w1;
        normalize_lp(u, p);
        out.knots.push_back(std::move(u));
    }

    const double endpoint_value = rayleigh(w, w1);
    const double path_tol = std::sqrt(opts.tol);
    std::vector<KnotState> states(static_cast<std::size_t>(knots));
    int it = 0;
    for (; it < opts.max_iters; ++it) {
        double bound = 0.0;
        int top = 1;
        for (int k = 1; k < knots - 1; ++k) {
            states[static_cast<std::size_t>(k)] = knot_state(w, out.knots[static_cast<std::size_t>(k)]);
            bound = std::max(bound, jacobian_bound(w, out.knots[static_cast<std::size_t>(k)].values()));
            if (states[static_cast<std::size_t>(k)].value > states[static_cast<std::size_t>(top)].value) top = k;
        }
        const auto& peak = states[static_cast<std::size_t>(top)];
        const double peak_residual =
            eigen_residual(w, out.knots[static_cast<std::size_t>(top)], peak.value);
        if (peak_residual <= path_tol * std::max(1.0, peak.value)) {
            out.converged = true;
            break;
        }
        // Step below the stability limit of explicit descent on the quotient.
        const double eta = opts.step0 / (p * bound);

        std::vector<GridFn> next = out.knots;
        for (int k = 1; k < knots - 1; ++k) {
            const GridFn& prev = out.knots[static_cast<std::size_t>(k - 1)];
            const GridFn& succ = out.knots[static_cast<std::size_t>(k + 1)];
            std::vector<double> tau(static_cast<std::size_t>(n));
            double tnorm = 0.0;
            for (int i = 0; i < n; ++i) {
                tau[static_cast<std::size_t>(i)] = succ[i] - prev[i];
                tnorm += tau[static_cast<std::size_t>(i)] * tau[static_cast<std::size_t>(i)];
            }
            tnorm = std::sqrt(tnorm);
            const auto& grad = states[static_cast<std::size_t>(k)].grad;
            double along = 0.0;
            if (tnorm > 0.0) {
                for (double& t : tau) t /= tnorm;
                along = std::inner_product(grad.begin(), grad.end(), tau.begin(), 0.0);
            }
            // Perpendicular descent; the maximal knot also climbs along the path.
            const double flip = k == top ? 2.0 : 1.0;
            GridFn& u = next[static_cast<std::size_t>(k)];
            for (int i = 0; i < n; ++i) {
                const auto ii = static_cast<std::size_t>(i);
                u[i] -= eta * (grad[ii] - flip * along * tau[ii]);
            }
            normalize_lp(u, p);
        }
        out.knots = std::move(next);
        redistribute(out.knots, 0, top, p);
        redistribute(out.knots, top, knots - 1, p);
    }

    out.iterations = it;
    out.rayleigh.assign(static_cast<std::size_t>(knots), endpoint_value);
    out.top = 1;
    for (int k = 1; k < knots - 1; ++k) {
        out.rayleigh[static_cast<std::size_t>(k)] = rayleigh(w, out.knots[static_cast<std::size_t>(k)]);
        if (out.rayleigh[static_cast<std::size_t>(k)] > out.rayleigh[static_cast<std::size_t>(out.top)]) out.top = k;
    }
    out.value = out.rayleigh[static_cast<std::size_t>(out.top)];
    return out;
}

std::vector<EigenPair> eigens_linear(const NonlocalWeights& w, int m) {
    if (w.p() != 2.0) throw DomainError("eigens_linear: requires p = 2");
    if (m < 1 || m > w.n()) throw DomainError("eigens_linear: require 1 <= m <= n");
    const SymmetricEigen eig = jacobi_eigen(assemble_linear(w));
    std::vector<EigenPair> out;
    for (int k = 0; k < m; ++k) {
        GridFn u(w.grid, eig.vectors[static_cast<std::size_t>(k)]);
        normalize_lp(u, 2.0);
        sign_fix(u);
        EigenPair e{eig.values[static_cast<std::size_t>(k)], u};
        e.residual = eigen_residual(w, e.fn, e.value);
        e.iterations = eig.sweeps;
        e.converged = true;
        out.push_back(std::move(e));
    }
    return out;
}

std::string eigen_json(const EigenPair& pair, const NonlocalWeights& w) {
    nlohmann::ordered_json j;
    j["value"] = pair.value;
    j["residual"] = pair.residual;
    j["iterations"] = pair.iterations;
    j["converged"] = pair.converged;
    j["s"] = w.params.s;
    j["p"] = w.params.p;
    j["n"] = w.n();
    return j.dump(2);
}

}  // namespace fraclab
