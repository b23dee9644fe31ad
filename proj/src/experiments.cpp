#include "fraclab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <ostream>
#include <thread>

namespace fraclab {

namespace {

// Runs task(i) for i in [0, count) on up to `threads` workers. Results are
// written by index, so output order never depends on scheduling.
template <typename Task>
void parallel_for(std::size_t count, int threads, Task&& task) {
    const std::size_t workers =
        std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, threads)));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::vector<std::exception_ptr> errors(count);
    std::atomic<std::size_t> next{0};
    {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < workers; ++t) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < count; i = next++) {
                    try {
                        task(i);
                    } catch (...) {
                        errors[i] = std::current_exception();
                    }
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

std::string describe(const char* label, const ScanRow& row) {
    return std::string(label) + " lambda=" + format_real(row.lambda) + " min_u=" + format_real(row.min_u) +
           " max_u=" + format_real(row.max_u);
}

}  // namespace

ScanRow make_row(const SolveReport& report) {
    const GridFn& u = report.solution;
    const SignSplit split = sign_split(u);
    ScanRow row;
    row.lambda = report.lambda;
    row.min_u = u.min();
    row.max_u = u.max();
    row.meas_pos = split.meas_pos;
    row.meas_neg = split.meas_neg;
    row.norm_inf = u.norm_inf();
    row.iterations = report.iterations;
    row.converged = report.converged;
    row.diverged = report.diverged;
    return row;
}

bool strictly_positive(const ScanRow& row) { return row.converged && row.min_u > 0.0 && row.meas_neg == 0.0; }
bool strictly_negative(const ScanRow& row) { return row.converged && row.max_u < 0.0 && row.meas_pos == 0.0; }

Spectrum compute_spectrum(const NonlocalWeights& w, const SolveOpts& opts, int knots) {
    Spectrum sp{lambda1_solve(w, opts)};
    if (!sp.first.converged) throw ConvergenceError("compute_spectrum: first eigenpair did not converge");
    sp.lambda2 = lambda2_path(w, sp.first, knots, opts).value;
    return sp;
}

void require_nonnegative_forcing(const GridFn& f, const char* where) {
    bool nonzero = false;
    for (double v : f.values()) {
        if (v < 0.0) throw DomainError(std::string(where) + ": forcing must be >= 0 nodewise");
        if (v > 0.0) nonzero = true;
    }
    if (!nonzero) throw DomainError(std::string(where) + ": forcing must not vanish identically");
}

SignedScan verify_max_principle(const NonlocalWeights& w, const std::vector<double>& lambdas, const GridFn& f,
                                const SolveOpts& opts, const EigenPair& first, int threads) {
    require_nonnegative_forcing(f, "verify_max_principle");
    for (double lambda : lambdas) {
        if (!(lambda < first.value)) {
            throw DomainError("verify_max_principle: lambda " + format_real(lambda) +
                              " is not below lambda1 = " + format_real(first.value));
        }
    }
    const GridFn neg = -f;
    const std::size_t m = lambdas.size();
    SignedScan out;
    out.forward.resize(m);
    out.mirrored.resize(m);
    parallel_for(2 * m, threads, [&](std::size_t k) {
        const std::size_t i = k % m;
        const bool mirrored = k >= m;
        const SolveReport r = solve_subcritical(w, lambdas[i], mirrored ? neg : f, opts);
        (mirrored ? out.mirrored : out.forward)[i] = make_row(r);
    });
    for (std::size_t i = 0; i < m; ++i) {
        const ScanRow& a = out.forward[i];
        const ScanRow& b = out.mirrored[i];
        if (!a.converged) out.failures.push_back(describe("f", a));
        else if (!strictly_positive(a)) out.violations.push_back(describe("f", a));
        if (!b.converged) out.failures.push_back(describe("-f", b));
        else if (!strictly_negative(b)) out.violations.push_back(describe("-f", b));
    }
    return out;
}

SignedScan scan_antimax(const NonlocalWeights& w, const GridFn& f, const std::vector<double>& eps_list,
                        const SolveOpts& opts, const Spectrum& spectrum, int threads) {
    require_nonnegative_forcing(f, "scan_antimax");
    const double lambda1 = spectrum.first.value;
    for (double eps : eps_list) {
        if (!(eps > 0.0)) throw DomainError("scan_antimax: eps must be positive");
        if (!(lambda1 + eps < spectrum.lambda2)) {
            throw DomainError("scan_antimax: lambda1 + eps = " + format_real(lambda1 + eps) +
                              " is not below the lambda2 estimate " + format_real(spectrum.lambda2));
        }
    }
    const GridFn neg = -f;
    const std::size_t m = eps_list.size();
    SignedScan out;
    out.forward.resize(m);
    out.mirrored.resize(m);
    parallel_for(2 * m, threads, [&](std::size_t k) {
        const std::size_t i = k % m;
        const bool mirrored = k >= m;
        const SolveReport r =
            solve_homotopy(w, lambda1 + eps_list[i], mirrored ? neg : f, opts, spectrum.first);
        (mirrored ? out.mirrored : out.forward)[i] = make_row(r);
    });
    for (std::size_t i = 0; i < m; ++i) {
        const ScanRow& a = out.forward[i];
        const ScanRow& b = out.mirrored[i];
        if (!a.converged) out.failures.push_back(describe("f", a));
        else if (!strictly_negative(a)) out.violations.push_back(describe("f", a));
        if (!b.converged) out.failures.push_back(describe("-f", b));
        else if (!strictly_positive(b)) out.violations.push_back(describe("-f", b));
    }
    return out;
}

DeltaEstimate estimate_delta(const NonlocalWeights& w, const GridFn& f, const SolveOpts& opts,
                             const Spectrum& spectrum, double eps0, double growth) {
    require_nonnegative_forcing(f, "estimate_delta");
    if (!(eps0 > 0.0) || !(growth > 1.0)) throw DomainError("estimate_delta: need eps0 > 0, growth > 1");
    const double lambda1 = spectrum.first.value;
    DeltaEstimate out;
    for (double eps = eps0; lambda1 + eps < spectrum.lambda2; eps *= growth) {
        const ScanRow row = make_row(solve_homotopy(w, lambda1 + eps, f, opts, spectrum.first));
        out.rows.push_back(row);
        if (!row.converged) continue;
        if (!strictly_negative(row)) {
            out.first_impure = eps;
            break;
        }
        out.largest_pure = eps;
    }
    return out;
}

std::vector<BlowupRow> blowup_study(const NonlocalWeights& w, const GridFn& f, const std::vector<double>& deltas,
                                    const SolveOpts& opts, const EigenPair& first) {
    require_nonnegative_forcing(f, "blowup_study");
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        if (!(deltas[k] > 0.0)) throw DomainError("blowup_study: deltas must be positive");
        if (k > 0 && !(deltas[k] < deltas[k - 1])) throw DomainError("blowup_study: deltas must decrease");
    }
    const double p = w.p();
    std::vector<BlowupRow> rows;
    std::optional<GridFn> warm;
    for (std::size_t k = 0; k < deltas.size(); ++k) {
        const double delta = deltas[k];
        if (warm && k > 0) *warm *= std::pow(deltas[k - 1] / delta, 1.0 / (p - 1.0));
        const SolveReport r = solve_subcritical(w, first.value - delta, f, opts, warm);
        warm = r.solution;

        BlowupRow row;
        row.delta = delta;
        row.lambda = r.lambda;
        row.norm_inf = r.solution.norm_inf();
        row.iterations = r.iterations;
        row.converged = r.converged;
        row.log_slope = std::numeric_limits<double>::quiet_NaN();
        if (!rows.empty()) {
            const BlowupRow& prev = rows.back();
            row.log_slope = std::log(row.norm_inf / prev.norm_inf) / std::log(delta / prev.delta);
        }
        const double norm = lp_norm(r.solution, p);
        row.w1_distance = std::numeric_limits<double>::infinity();
        if (norm > 0.0) {
            double dist = 0.0;
            for (int i = 0; i < r.solution.size(); ++i) {
                dist = std::max(dist, std::fabs(r.solution[i] / norm - first.fn[i]));
            }
            row.w1_distance = dist;
        }
        rows.push_back(row);
    }
    return rows;
}

LinearAntimax verify_antimax_linear(const Grid1D& grid, double s, const GridFn& f,
                                    const std::vector<double>& delta_list, Quadrature rule) {
    require_same_grid(grid, f.grid(), "verify_antimax_linear");
    const NonlocalWeights w = build_weights(FracParams::make(1, s, 2.0), grid, rule);
    const std::vector<EigenPair> eig = eigens_linear(w, 1);
    const EigenPair& w1 = eig.front();

    LinearAntimax out;
    out.lambda1 = w1.value;
    out.projection = inner(f, w1.fn);
    if (std::fabs(out.projection) <= 1e-10 * std::max(1.0, lp_norm(f, 2.0))) {
        throw DomainError("verify_antimax_linear: forcing is orthogonal to the first eigenfunction");
    }
    const bool positive = out.projection > 0.0;
    for (double delta : delta_list) {
        if (!(delta > 0.0)) throw DomainError("verify_antimax_linear: deltas must be positive");
        const ScanRow up = make_row(solve_linear(w, w1.value + delta, f));
        const ScanRow down = make_row(solve_linear(w, w1.value - delta, f));
        const bool up_ok = positive ? strictly_negative(up) : strictly_positive(up);
        const bool down_ok = positive ? strictly_positive(down) : strictly_negative(down);
        if (!up_ok) out.violations.push_back(describe("above", up));
        if (!down_ok) out.violations.push_back(describe("below", down));
        out.above.push_back(up);
        out.below.push_back(down);
    }
    return out;
}

SetMeasureSummary negative_set_report(const std::vector<ScanRow>& rows, const std::vector<double>& scalings,
                                      double h, SignSet side) {
    if (rows.empty()) throw DomainError("negative_set_report: no rows");
    if (rows.size() != scalings.size()) throw DomainError("negative_set_report: one scaling per row required");
    SetMeasureSummary out;
    out.min_measure = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const double m = side == SignSet::kNegative ? rows[i].meas_neg : rows[i].meas_pos;
        out.min_measure = std::min(out.min_measure, m);
        if (m == 0.0) out.violations.push_back(i);
    }
    out.holds = out.violations.empty() && out.min_measure >= h * (1.0 - 1e-12);
    return out;
}

std::vector<ScanRow> negative_set_scan(const NonlocalWeights& w, double lambda, const GridFn& f,
                                       const std::vector<double>& scalings, const SolveOpts& opts,
                                       const EigenPair& first, int threads) {
    if (!(lambda >= first.value)) throw DomainError("negative_set_scan: lambda must be >= lambda1");
    std::vector<ScanRow> rows(scalings.size());
    parallel_for(scalings.size(), threads, [&](std::size_t i) {
        rows[i] = make_row(solve_homotopy(w, lambda, scalings[i] * f, opts, first));
    });
    return rows;
}

void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows, const NonlocalWeights& w) {
    os << kScanHeader << '\n';
    for (const ScanRow& r : rows) {
        os << format_real(r.lambda) << ',' << format_real(w.params.s) << ',' << format_real(w.params.p) << ','
           << w.n() << ',' << format_real(r.min_u) << ',' << format_real(r.max_u) << ','
           << format_real(r.meas_neg) << ',' << format_real(r.meas_pos) << ',' << format_real(r.norm_inf) << ','
           << r.iterations << ',' << (r.converged ? 1 : 0) << ',' << (r.diverged ? 1 : 0) << '\n';
    }
}

void write_blowup_csv(std::ostream& os, const std::vector<BlowupRow>& rows) {
    os << kBlowupHeader << '\n';
    for (const BlowupRow& r : rows) {
        os << format_real(r.delta) << ',' << format_real(r.lambda) << ',' << format_real(r.norm_inf) << ','
           << format_real(r.log_slope) << ',' << format_real(r.w1_distance) << ',' << r.iterations << ','
           << (r.converged ? 1 : 0) << '\n';
    }
}

}  // namespace fraclab
