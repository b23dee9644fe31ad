#include "fraclab/solver.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

#include <json.hpp>

#include "fraclab/eigen.hpp"

namespace fraclab {

void SolveOpts::validate() const {
    if (!(tol > 0.0)) throw DomainError("SolveOpts: tol must be positive");
    if (max_iters < 1) throw DomainError("SolveOpts: max_iters must be >= 1");
    if (!(step0 > 0.0)) throw DomainError("SolveOpts: step0 must be positive");
    if (!(armijo > 0.0 && armijo < 1.0)) throw DomainError("SolveOpts: armijo must lie in (0,1)");
    if (radius && !(*radius > 0.0)) throw DomainError("SolveOpts: radius must be positive");
    if (!(relax > 0.0 && relax <= 1.0)) throw DomainError("SolveOpts: relax must lie in (0,1]");
    if (t_steps < 1) throw DomainError("SolveOpts: t_steps must be >= 1");
    if (memory < 0) throw DomainError("SolveOpts: memory must be >= 0");
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double sup_abs(std::span<const double> a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::fabs(v));
    return m;
}

bool all_finite(std::span<const double> a) {
    return std::all_of(a.begin(), a.end(), [](double v) { return std::isfinite(v); });
}

/// J_h, its nodal residual and a magnitude scale for roundoff decisions.
struct Evaluation {
    std::vector<double> x;
    std::vector<double> res;  // L x - lambda phi(x) - f; gradient of J is h * res
    double value = 0.0;
    double magnitude = 0.0;
    double sup_res = 0.0;
};

class Functional {
public:
    Functional(const NonlocalWeights& w, double lambda, std::span<const double> f)
        : w_(w), lambda_(lambda), f_(f) {}

    void evaluate(Evaluation& e) const {
        const int n = w_.n();
        const double p = w_.p();
        const double h = w_.grid.h();
        e.res.resize(static_cast<std::size_t>(n));
        const double energy = energy_and_apply(w_, e.x, e.res);
        double mass = 0.0;
        double load = 0.0;
        double load_abs = 0.0;
        for (int i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            const double ph = phi_unchecked(e.x[k], p);
            mass += ph * e.x[k];
            load += f_[k] * e.x[k];
            load_abs += std::fabs(f_[k] * e.x[k]);
            e.res[k] -= lambda_ * ph + f_[k];
        }
        mass *= h;
        e.value = energy / p - lambda_ * mass / p - h * load;
        e.magnitude = energy / p + std::fabs(lambda_) * mass / p + h * load_abs;
        e.sup_res = sup_abs(e.res);
    }

private:
    const NonlocalWeights& w_;
    double lambda_;
    std::span<const double> f_;
};

struct Correction {
    std::vector<double> s;
    std::vector<double> y;
    double rho;
};

// Two-loop recursion: d = -H g with H the L-BFGS inverse Hessian estimate.
std::vector<double> lbfgs_direction(const std::deque<Correction>& hist, std::span<const double> g,
                                    double gamma) {
    std::vector<double> q(g.begin(), g.end());
    std::vector<double> alpha(hist.size());
    for (std::size_t k = hist.size(); k-- > 0;) {
        alpha[k] = hist[k].rho * dot(hist[k].s, q);
        for (std::size_t i = 0; i < q.size(); ++i) q[i] -= alpha[k] * hist[k].y[i];
    }
    for (double& v : q) v *= gamma;
    for (std::size_t k = 0; k < hist.size(); ++k) {
        const double beta = hist[k].rho * dot(hist[k].y, q);
        for (std::size_t i = 0; i < q.size(); ++i) q[i] += (alpha[k] - beta) * hist[k].s[i];
    }
    for (double& v : q) v = -v;
    return q;
}

// Descent stops once the residual has not improved for this many steps.
constexpr int kStallWindow = 5000;

SolveReport minimize_J(const NonlocalWeights& w, double lambda, const GridFn& f, const SolveOpts& opts,
                       std::vector<double> x0) {
    const int n = w.n();
    const double h = w.grid.h();
    const Functional func(w, lambda, f.values());

    Evaluation cur;
    cur.x = std::move(x0);
    func.evaluate(cur);

    SolveReport report{GridFn(w.grid), lambda};
    std::deque<Correction> hist;
    double sd_step = 0.0;  // steepest-descent step carried between iterations

    auto initial_scale = [&](std::span<const double> x) {
        const double bound = jacobian_bound(w, x);
        return bound > 1e-300 ? opts.step0 / (h * bound) : opts.step0;
    };

    int it = 0;
    double best = cur.sup_res;
    int last_gain = 0;
    while (cur.sup_res > opts.tol && it < opts.max_iters) {
        if (cur.sup_res < 0.999 * best) {
            best = cur.sup_res;
            last_gain = it;
        } else if (it - last_gain > kStallWindow) {
            break;
        }
        std::vector<double> grad(cur.res);
        for (double& g : grad) g *= h;

        std::vector<double> dir;
        double alpha = 1.0;
        if (opts.memory > 0 && !hist.empty()) {
            const Correction& last = hist.back();
            const double gamma = dot(last.s, last.y) / dot(last.y, last.y);
            dir = lbfgs_direction(hist, grad, gamma);
        }
        double slope = dir.empty() ? 0.0 : dot(grad, dir);
        if (dir.empty() || !(slope < 0.0)) {
            hist.clear();
            dir.assign(grad.begin(), grad.end());
            for (double& d : dir) d = -d;
            slope = dot(grad, dir);
            if (opts.memory > 0 || sd_step == 0.0) {
                alpha = initial_scale(cur.x);
            } else {
                alpha = 2.0 * sd_step;
            }
        }

        Evaluation trial;
        trial.x.resize(static_cast<std::size_t>(n));
        bool accepted = false;
        for (int bt = 0; bt < 80; ++bt) {
            for (int i = 0; i < n; ++i) {
                const auto k = static_cast<std::size_t>(i);
                trial.x[k] = cur.x[k] + alpha * dir[k];
            }
            func.evaluate(trial);
            if (std::isfinite(trial.value)) {
                if (trial.value <= cur.value + opts.armijo * alpha * slope) {
                    accepted = true;
                    break;
                }
                // Near the minimum the predicted decrease sinks below the
                // rounding level of J; accept steps that stay inside that band
                // and do not increase the slope along the search line.
                const double band = 1e-13 * (cur.magnitude + trial.magnitude);
                if (trial.value <= cur.value + band &&
                    std::fabs(h * dot(trial.res, dir)) <= std::fabs(slope)) {
                    accepted = true;
                    break;
                }
            }
            alpha *= 0.5;
        }
        if (!accepted) break;

        const double band = 1e-13 * (cur.magnitude + trial.magnitude);
        if (trial.value > cur.value + band) report.monotone = false;

        if (opts.memory > 0) {
            Correction c{std::vector<double>(static_cast<std::size_t>(n)),
                         std::vector<double>(static_cast<std::size_t>(n)), 0.0};
            for (int i = 0; i < n; ++i) {
                const auto k = static_cast<std::size_t>(i);
                c.s[k] = alpha * dir[k];
                c.y[k] = h * (trial.res[k] - cur.res[k]);
            }
            const double sy = dot(c.s, c.y);
            if (sy > 1e-16 * std::sqrt(dot(c.s, c.s) * dot(c.y, c.y))) {
                c.rho = 1.0 / sy;
                hist.push_back(std::move(c));
                if (static_cast<int>(hist.size()) > opts.memory) hist.pop_front();
            }
        } else {
            sd_step = alpha;
        }
        cur = std::move(trial);
        ++it;
        if (!all_finite(cur.x)) break;
    }

    report.iterations = it;
    report.residual = cur.sup_res;
    report.energy = cur.value;
    report.converged = std::isfinite(cur.sup_res) && cur.sup_res <= opts.tol;
    if (all_finite(cur.x)) report.solution = GridFn(w.grid, std::move(cur.x));
    return report;
}

GridFn phi_of(const GridFn& u, double p, double scale) {
    GridFn out(u.grid());
    for (int i = 0; i < u.size(); ++i) out[i] = scale * phi_unchecked(u[i], p);
    return out;
}

}  // namespace

double functional_J(const NonlocalWeights& w, double lambda, const GridFn& f, const GridFn& u) {
    require_same_grid(w.grid, f.grid(), "functional_J");
    require_same_grid(w.grid, u.grid(), "functional_J");
    const double p = w.p();
    return energy(w, u) / p - lambda * lp_norm_pow(u, p) / p - inner(f, u);
}

double residual_sup(const NonlocalWeights& w, double lambda, const GridFn& f, const GridFn& u) {
    require_same_grid(w.grid, f.grid(), "residual_sup");
    const GridFn lu = apply_operator(w, u);
    double m = 0.0;
    for (int i = 0; i < u.size(); ++i) {
        m = std::max(m, std::fabs(lu[i] - lambda * phi_unchecked(u[i], w.p()) - f[i]));
    }
    return m;
}

SolveReport solve_subcritical(const NonlocalWeights& w, double lambda, const GridFn& f,
                              const SolveOpts& opts, const std::optional<GridFn>& initial) {
    opts.validate();
    require_same_grid(w.grid, f.grid(), "solve_subcritical");
    std::vector<double> x0(static_cast<std::size_t>(w.n()), 0.0);
    if (initial) {
        require_same_grid(w.grid, initial->grid(), "solve_subcritical");
        x0.assign(initial->values().begin(), initial->values().end());
    }
    return minimize_J(w, lambda, f, opts, std::move(x0));
}

GridFn resolvent(const NonlocalWeights& w, const GridFn& g, const SolveOpts& opts,
                 const std::optional<GridFn>& initial) {
    SolveReport r = solve_subcritical(w, 0.0, g, opts, initial);
    if (!r.converged) {
        throw ConvergenceError("resolvent: residual " + format_real(r.residual) + " above tol " +
                               format_real(opts.tol) + " after " + std::to_string(r.iterations) +
                               " iterations");
    }
    return std::move(r.solution);
}

// Relative distance to lambda1 below which the radius stops growing; closer
// shifts are treated as resonant.
constexpr double kResonanceGap = 1e-3;

double default_radius(const NonlocalWeights& w, double lambda, const GridFn& f, const EigenPair& first,
                      const SolveOpts& opts) {
    const double lambda1 = first.value;
    const double p = w.p();
    SolveOpts inner = opts;
    inner.radius.reset();
    const SolveReport below = solve_subcritical(w, 0.9 * lambda1, f, inner);
    const double base = 10.0 * seminorm(w, below.solution);
    const double gap = std::max(std::fabs(lambda - lambda1), kResonanceGap * lambda1);
    const double scale = std::max(1.0, std::pow(0.1 * lambda1 / gap, 1.0 / (p - 1.0)));
    return base * scale;
}

// Sweeps without a 10% residual drop or 25% norm growth before a continuation
// step is abandoned.
constexpr int kMaxStale = 25;

SolveReport solve_homotopy(const NonlocalWeights& w, double lambda, const GridFn& f,
                           const SolveOpts& opts, const EigenPair& first) {
    opts.validate();
    require_same_grid(w.grid, f.grid(), "solve_homotopy");
    require_same_grid(w.grid, first.fn.grid(), "solve_homotopy");
    const int n = w.n();
    const double p = w.p();
    const double relax = opts.relax;
    const double radius = opts.radius ? *opts.radius : default_radius(w, lambda, f, first, opts);

    // Unit l2 direction of the first eigenfunction: the one mode along which
    // the map u -> R(lambda phi_p(u)) expands when lambda > lambda1.
    std::vector<double> e(first.fn.values().begin(), first.fn.values().end());
    const double enorm = std::sqrt(dot(e, e));
    for (double& v : e) v /= enorm;

    SolveOpts inner = opts;
    inner.tol = 0.1 * opts.tol;

    SolveReport report{GridFn(w.grid), lambda};
    GridFn u(w.grid);
    std::optional<GridFn> warm;

    // One damped sweep G(u) = (1-relax) u + relax R(lambda phi_p(u) + t f).
    auto sweep = [&](const GridFn& v, double t, std::optional<GridFn>& guess) {
        GridFn rhs = phi_of(v, p, lambda);
        if (t != 0.0) rhs += t * f;
        // The inner target is floored at the rounding level of the data; a
        // stalled inner solve is still used and the outer residual decides.
        SolveOpts local = inner;
        local.tol = std::max(inner.tol, 1e-13 * rhs.norm_inf());
        SolveReport r = solve_subcritical(w, 0.0, rhs, local, guess);
        guess = r.solution;
        return (1.0 - relax) * v + relax * r.solution;
    };

    auto diverge = [&](const GridFn& at, int total) {
        report.diverged = true;
        report.iterations = total;
        report.residual = std::numeric_limits<double>::infinity();
        report.solution = at;
        report.energy = functional_J(w, lambda, f, report.solution);
        return report;
    };

    int total = 0;
    double alpha_ref = 0.0;
    double t_prev = 0.0;
    for (int k = 1; k <= opts.t_steps; ++k) {
        const double t = static_cast<double>(k) / opts.t_steps;
        if (t_prev > 0.0) {
            // The equation is (p-1)-homogeneous jointly in (u, t f).
            u *= std::pow(t / t_prev, 1.0 / (p - 1.0));
            if (warm) *warm *= std::pow(t / t_prev, 1.0 / (p - 1.0));
        }
        GridFn tf = t * f;
        double best = residual_sup(w, lambda, tf, u);
        bool done = best <= opts.tol;
        int iters = 0;
        int stale = 0;
        double size_ref = seminorm(w, u);
        while (!done && iters < opts.max_iters) {
            GridFn gu = sweep(u, t, warm);
            const double alpha = dot(e, u.values());
            const double beta = dot(e, gu.values());

            const double sigma = 1e-6 * std::max(1.0, u.norm_inf());
            GridFn shifted = u;
            for (int i = 0; i < n; ++i) shifted[i] += sigma * e[static_cast<std::size_t>(i)];
            std::optional<GridFn> probe_guess = warm;
            const GridFn gs = sweep(shifted, t, probe_guess);
            const double slope = (dot(e, gs.values()) - beta) / sigma;

            // Newton on alpha - e.G(alpha e + v) = 0 along e; plain sweep elsewhere.
            if (alpha_ref == 0.0) alpha_ref = std::fabs(beta);
            // Trust cap: crossing between branches expands geometrically
            // instead of jumping past the radius on a near-zero slope.
            const double cap = 2.0 * std::max(std::fabs(alpha), alpha_ref);
            const double alpha_next = alpha + std::clamp(-(alpha - beta) / (1.0 - slope), -cap, cap);
            GridFn next = gu;
            for (int i = 0; i < n; ++i) next[i] += (alpha_next - beta) * e[static_cast<std::size_t>(i)];
            ++iters;
            ++total;

            if (!all_finite(next.values()) || seminorm(w, next) > radius) {
                return diverge(all_finite(next.values()) ? next : u, total);
            }
            u = std::move(next);
            const double res = residual_sup(w, lambda, tf, u);
            const double size = seminorm(w, u);
            if (res < 0.9 * best) {
                best = res;
                stale = 0;
                size_ref = size;
            } else if (size > 1.25 * size_ref) {
                // Steady growth is the approach to the radius, not stagnation.
                stale = 0;
                size_ref = size;
            } else if (++stale >= kMaxStale) {
                break;
            }
            done = res <= opts.tol;
        }
        if (!done) {
            report.iterations = total;
            report.residual = residual_sup(w, lambda, f, u);
            report.solution = u;
            report.energy = functional_J(w, lambda, f, u);
            return report;
        }
        t_prev = t;
    }
    report.iterations = total;
    report.residual = residual_sup(w, lambda, f, u);
    report.converged = report.residual <= opts.tol;
    report.energy = functional_J(w, lambda, f, u);
    report.solution = std::move(u);
    return report;
}

SolveReport solve_homotopy(const NonlocalWeights& w, double lambda, const GridFn& f,
                           const SolveOpts& opts) {
    const EigenPair first = lambda1_solve(w, opts);
    return solve_homotopy(w, lambda, f, opts, first);
}

SolveReport solve_linear(const NonlocalWeights& w, double lambda, const GridFn& f) {
    require_same_grid(w.grid, f.grid(), "solve_linear");
    DenseMatrix a = assemble_linear(w);
    for (int i = 0; i < a.size(); ++i) a(i, i) -= lambda;
    std::vector<double> rhs(f.values().begin(), f.values().end());
    std::vector<double> x = solve_dense(std::move(a), std::move(rhs));

    SolveReport report{GridFn(w.grid, std::move(x)), lambda};
    report.residual = residual_sup(w, lambda, f, report.solution);
    report.iterations = 1;
    report.energy = functional_J(w, lambda, f, report.solution);
    report.converged = std::isfinite(report.residual);
    return report;
}

std::string report_json(const SolveReport& report, const NonlocalWeights& w) {
    nlohmann::ordered_json j;
    j["lambda"] = report.lambda;
    j["s"] = w.params.s;
    j["p"] = w.params.p;
    j["n"] = w.n();
    j["residual"] = std::isfinite(report.residual) ? nlohmann::ordered_json(report.residual)
                                                   : nlohmann::ordered_json(nullptr);
    j["iterations"] = report.iterations;
    j["converged"] = report.converged;
    j["diverged"] = report.diverged;
    j["energy"] = report.energy;
    return j.dump(2);
}

}  // namespace fraclab
