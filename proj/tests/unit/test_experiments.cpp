#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fraclab/experiments.hpp"

using namespace fraclab;

namespace {

NonlocalWeights weights(int n, double s, double p, Quadrature rule = Quadrature::kCellCentered) {
    return build_weights(FracParams::make(1, s, p), Grid1D(0, 1, n), rule);
}

GridFn ones(const NonlocalWeights& w) { return GridFn::constant(w.grid, 1.0); }

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

ScanRow row_with(double meas_neg, double meas_pos) {
    ScanRow r;
    r.converged = true;
    r.meas_neg = meas_neg;
    r.meas_pos = meas_pos;
    return r;
}

}  // namespace

TEST_CASE("make_row and sign predicates") {
    const Grid1D g(0, 1, 3);
    SolveReport r{GridFn(g, {-1.0, 0.0, 2.0}), 1.5};
    r.converged = true;
    const ScanRow row = make_row(r);
    CHECK(row.lambda == 1.5);
    CHECK(row.min_u == -1.0);
    CHECK(row.max_u == 2.0);
    CHECK(row.meas_neg == doctest::Approx(0.25));
    CHECK(row.meas_pos == doctest::Approx(0.25));
    CHECK(row.norm_inf == 2.0);
    CHECK_FALSE(strictly_positive(row));
    CHECK_FALSE(strictly_negative(row));

    SolveReport pos{GridFn(g, {1.0, 2.0, 3.0}), 0.0};
    CHECK_FALSE(strictly_positive(make_row(pos)));  // not converged
    pos.converged = true;
    CHECK(strictly_positive(make_row(pos)));
}

TEST_CASE("forcing preconditions") {
    const Grid1D g(0, 1, 3);
    CHECK_NOTHROW(require_nonnegative_forcing(GridFn(g, {0.0, 1.0, 0.0}), "t"));
    CHECK_THROWS_AS(require_nonnegative_forcing(GridFn(g), "t"), DomainError);
    CHECK_THROWS_AS(require_nonnegative_forcing(GridFn(g, {1.0, -1e-3, 1.0}), "t"), DomainError);
}

TEST_CASE("maximum principle two nodes") {
    // (A - 4 I) v = 1 with A = [[12.5, -4.5], [-4.5, 12.5]] gives v = (1/4, 1/4).
    const NonlocalWeights w = weights(2, 0.5, 2.0);
    const EigenPair first = eigens_linear(w, 1).front();
    const SignedScan scan = verify_max_principle(w, {4.0}, ones(w), SolveOpts{}, first);
    CHECK(scan.holds());
    CHECK(scan.forward[0].min_u == doctest::Approx(0.25).epsilon(1e-9));
    CHECK(scan.mirrored[0].max_u == doctest::Approx(-0.25).epsilon(1e-9));
    CHECK_THROWS_AS(verify_max_principle(w, {8.0}, ones(w), SolveOpts{}, first), DomainError);
    CHECK_THROWS_AS(verify_max_principle(w, {1.0}, GridFn(w.grid), SolveOpts{}, first), DomainError);
}

TEST_CASE("maximum principle scan") {
    for (double p : {2.0, 3.0}) {
        const NonlocalWeights w = weights(32, 0.4, p);
        const EigenPair first = lambda1_solve(w, SolveOpts{});
        std::vector<double> lambdas;
        for (double frac : {-2.0, 0.0, 0.5, 0.9}) lambdas.push_back(frac * first.value);
        GridFn bump(w.grid);
        for (int i = 10; i < 14; ++i) bump[i] = 1.0;
        const SignedScan scan = verify_max_principle(w, lambdas, bump, SolveOpts{}, first, 2);
        CHECK(scan.holds());
        CHECK(scan.forward.size() == lambdas.size());
        for (std::size_t i = 0; i < lambdas.size(); ++i) {
            CHECK(scan.forward[i].min_u == doctest::Approx(-scan.mirrored[i].max_u).epsilon(1e-8));
        }
    }
}

TEST_CASE("anti-maximum scan") {
    for (double p : {2.0, 3.0}) {
        const NonlocalWeights w = weights(32, 0.5, p);
        const Spectrum sp = compute_spectrum(w, SolveOpts{});
        CHECK(sp.lambda2 > sp.first.value);
        const double l1 = sp.first.value;
        const SignedScan scan = scan_antimax(w, ones(w), {0.002 * l1, 0.01 * l1}, SolveOpts{}, sp, 2);
        CHECK(scan.holds());
        for (const ScanRow& r : scan.forward) {
            CHECK(r.converged);
            CHECK(r.max_u < 0.0);
            CHECK(r.meas_pos == 0.0);
        }
        for (const ScanRow& r : scan.mirrored) CHECK(r.min_u > 0.0);
        // Closer to resonance the solution is larger.
        CHECK(scan.forward[0].norm_inf > scan.forward[1].norm_inf);

        if (p == 2.0) {
            const SolveReport ref = solve_linear(w, l1 + 0.002 * l1, ones(w));
            CHECK(scan.forward[0].min_u == doctest::Approx(ref.solution.min()).epsilon(1e-6));
        }
        CHECK_THROWS_AS(scan_antimax(w, ones(w), {0.0}, SolveOpts{}, sp), DomainError);
        CHECK_THROWS_AS(scan_antimax(w, ones(w), {sp.lambda2}, SolveOpts{}, sp), DomainError);
        CHECK_THROWS_AS(scan_antimax(w, GridFn(w.grid), {0.01 * l1}, SolveOpts{}, sp), DomainError);
    }
}

TEST_CASE("delta estimate") {
    const NonlocalWeights w = weights(24, 0.5, 2.0);
    const Spectrum sp = compute_spectrum(w, SolveOpts{});
    const DeltaEstimate est = estimate_delta(w, ones(w), SolveOpts{}, sp, 1e-3 * sp.first.value, 4.0);
    CHECK(est.largest_pure >= 1e-3 * sp.first.value);
    CHECK(est.largest_pure < sp.lambda2 - sp.first.value);
    CHECK_FALSE(est.rows.empty());
    if (est.first_impure) CHECK(*est.first_impure > est.largest_pure);
    CHECK_THROWS_AS(estimate_delta(w, ones(w), SolveOpts{}, sp, 0.0), DomainError);
    CHECK_THROWS_AS(estimate_delta(w, ones(w), SolveOpts{}, sp, 1.0, 1.0), DomainError);
}

TEST_CASE("blow-up rate") {
    for (auto [p, slope] : {std::pair{2.0, -1.0}, std::pair{3.0, -0.5}}) {
        const NonlocalWeights w = weights(32, 0.5, p);
        SolveOpts opts;
        opts.tol = 1e-12;
        const EigenPair first = lambda1_solve(w, opts);
        const double l1 = first.value;
        const std::vector<double> deltas{0.1 * l1, 0.03 * l1, 0.01 * l1, 0.003 * l1};
        const auto rows = blowup_study(w, ones(w), deltas, SolveOpts{}, first);
        REQUIRE(rows.size() == deltas.size());
        CHECK(std::isnan(rows[0].log_slope));
        for (std::size_t k = 0; k < rows.size(); ++k) {
            CHECK(rows[k].converged);
            CHECK(rows[k].lambda == doctest::Approx(l1 - deltas[k]));
            if (k == 0) continue;
            CHECK(rows[k].norm_inf > rows[k - 1].norm_inf);
            CHECK(rows[k].w1_distance < rows[k - 1].w1_distance);
        }
        CHECK(rows.back().log_slope == doctest::Approx(slope).epsilon(0.2));
    }
    const NonlocalWeights w = weights(8, 0.5, 2.0);
    const EigenPair first = eigens_linear(w, 1).front();
    CHECK_THROWS_AS(blowup_study(w, ones(w), {1.0, 2.0}, SolveOpts{}, first), DomainError);
    CHECK_THROWS_AS(blowup_study(w, ones(w), {-1.0}, SolveOpts{}, first), DomainError);
}

TEST_CASE("linear anti-maximum two nodes") {
    // lambda1 = 8 with eigenvector (1, 1): v = 1 / (8 - lambda) on both nodes.
    const Grid1D g(0, 1, 2);
    const LinearAntimax lin = verify_antimax_linear(g, 0.5, GridFn::constant(g, 1.0), {0.5, 2.0});
    CHECK(lin.lambda1 == doctest::Approx(8.0));
    CHECK(lin.holds());
    CHECK(lin.above[0].max_u == doctest::Approx(-2.0).epsilon(1e-12));
    CHECK(lin.below[1].min_u == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(lin.projection > 0.0);
}

TEST_CASE("linear anti-maximum sign structure") {
    const Grid1D g(0, 1, 40);
    const NonlocalWeights w = build_weights(FracParams::make(1, 0.5, 2.0), g, Quadrature::kCellCentered);
    const auto eig = eigens_linear(w, 2);
    const std::vector<double> deltas{1e-4 * eig[0].value, 1e-2 * eig[0].value};

    const LinearAntimax pos = verify_antimax_linear(g, 0.5, GridFn::constant(g, 1.0), deltas);
    CHECK(pos.holds());

    const LinearAntimax neg = verify_antimax_linear(g, 0.5, -eig[0].fn, deltas);
    CHECK(neg.projection < 0.0);
    CHECK(neg.holds());
    for (const ScanRow& r : neg.above) CHECK(r.min_u > 0.0);

    const LinearAntimax mixed = verify_antimax_linear(g, 0.5, eig[0].fn - 0.5 * eig[1].fn, {1e-4 * eig[0].value});
    CHECK(mixed.holds());

    CHECK_THROWS_AS(verify_antimax_linear(g, 0.5, eig[1].fn, deltas), DomainError);
    CHECK_THROWS_AS(verify_antimax_linear(g, 0.5, GridFn::constant(g, 1.0), {0.0}), DomainError);
}

TEST_CASE("negative set report") {
    const double h = 0.1;
    const SetMeasureSummary ok = negative_set_report({row_with(0.3, 0.0), row_with(0.1, 0.5)}, {1.0, 2.0}, h);
    CHECK(ok.holds);
    CHECK(ok.min_measure == doctest::Approx(0.1));

    const SetMeasureSummary bad = negative_set_report({row_with(0.3, 0.0), row_with(0.0, 0.9)}, {1.0, 2.0}, h);
    CHECK_FALSE(bad.holds);
    REQUIRE(bad.violations.size() == 1);
    CHECK(bad.violations[0] == 1);

    const SetMeasureSummary mirrored =
        negative_set_report({row_with(0.0, 0.4), row_with(0.0, 0.2)}, {1.0, 2.0}, h, SignSet::kPositive);
    CHECK(mirrored.holds);
    CHECK(mirrored.min_measure == doctest::Approx(0.2));

    CHECK_THROWS_AS(negative_set_report({}, {}, h), DomainError);
    CHECK_THROWS_AS(negative_set_report({row_with(0.1, 0.0)}, {1.0, 2.0}, h), DomainError);
}

TEST_CASE("negative set scan") {
    const NonlocalWeights w = weights(32, 0.5, 2.0);
    const EigenPair first = lambda1_solve(w, SolveOpts{});
    const std::vector<double> scalings{0.5, 1.0, 4.0};
    const auto rows = negative_set_scan(w, 1.01 * first.value, ones(w), scalings, SolveOpts{}, first, 2);
    const SetMeasureSummary s = negative_set_report(rows, scalings, w.grid.h());
    CHECK(s.holds);
    // Linear scaling in the forcing.
    CHECK(rows[2].norm_inf == doctest::Approx(8.0 * rows[0].norm_inf).epsilon(1e-6));
    CHECK_THROWS_AS(negative_set_scan(w, 0.5 * first.value, ones(w), scalings, SolveOpts{}, first), DomainError);
}

TEST_CASE("csv headers") {
    const NonlocalWeights w = weights(4, 0.5, 2.0);
    std::ostringstream scan;
    write_scan_csv(scan, {row_with(0.0, 1.0)}, w);
    CHECK(first_line(scan.str()) ==
          "lambda,s,p,n,min_u,max_u,meas_neg,meas_pos,norm_inf,iterations,converged,diverged");
    std::ostringstream blow;
    write_blowup_csv(blow, {BlowupRow{}});
    CHECK(first_line(blow.str()) == "delta,lambda,norm_inf,log_slope,w1_distance,iterations,converged");
    const std::string text = scan.str();
    CHECK(std::count(text.begin(), text.end(), '\n') == 2);
}
