#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fraclab/eigen.hpp"
#include "fraclab/solver.hpp"

namespace fraclab {

/// One solve of a lambda scan, reduced to its sign structure.
struct ScanRow {
    double lambda = 0.0;
    double min_u = 0.0;
    double max_u = 0.0;
    double meas_pos = 0.0;
    double meas_neg = 0.0;
    double norm_inf = 0.0;
    int iterations = 0;
    bool converged = false;
    bool diverged = false;
};

ScanRow make_row(const SolveReport& report);

/// converged, every node > 0.
bool strictly_positive(const ScanRow& row);
/// converged, every node < 0.
bool strictly_negative(const ScanRow& row);

/// Rows for f together with the mirrored rows for -f, and the rows (by
/// description) that contradict the expected sign.
struct SignedScan {
    std::vector<ScanRow> forward;
    std::vector<ScanRow> mirrored;
    std::vector<std::string> violations;  ///< converged rows with the wrong sign
    std::vector<std::string> failures;    ///< rows whose solve did not converge
    bool holds() const { return violations.empty() && failures.empty(); }
};

/// Both eigen estimates needed to place a scan.
struct Spectrum {
    EigenPair first;
    double lambda2 = 0.0;
};

/// lambda1 by inverse power, lambda2 by the path bound (`knots` knots).
Spectrum compute_spectrum(const NonlocalWeights& w, const SolveOpts& opts, int knots = 21);

/// Requires f >= 0 nodewise with f != 0; throws DomainError otherwise.
void require_nonnegative_forcing(const GridFn& f, const char* where);

/// Subcritical solves for each lambda (all below lambda1): u > 0 for f and
/// u < 0 for -f. Non-converged solves are failures, never passes.
SignedScan verify_max_principle(const NonlocalWeights& w, const std::vector<double>& lambdas, const GridFn& f,
                                const SolveOpts& opts, const EigenPair& first, int threads = 1);

/// Homotopy solves at lambda1 + eps: u < 0 for f and u > 0 for -f in every
/// converged row. Divergent rows are recorded, not counted as violations.
SignedScan scan_antimax(const NonlocalWeights& w, const GridFn& f, const std::vector<double>& eps_list,
                        const SolveOpts& opts, const Spectrum& spectrum, int threads = 1);

struct DeltaEstimate {
    double largest_pure = 0.0;              ///< 0 when even the first eps fails
    std::optional<double> first_impure;     ///< eps at which purity first broke
    std::vector<ScanRow> rows;
};

/// Scans eps = eps0 * growth^k upward while lambda1 + eps < lambda2 and the
/// converged solutions stay strictly negative.
DeltaEstimate estimate_delta(const NonlocalWeights& w, const GridFn& f, const SolveOpts& opts,
                             const Spectrum& spectrum, double eps0, double growth = 2.0);

struct BlowupRow {
    double delta = 0.0;       ///< lambda1 - lambda
    double lambda = 0.0;
    double norm_inf = 0.0;
    double log_slope = 0.0;   ///< secant of log norm_inf vs log delta (NaN for the first row)
    double w1_distance = 0.0; ///< sup |u / lp_norm(u) - w1|
    int iterations = 0;
    bool converged = false;
};

/// Subcritical solves at lambda1 - delta for decreasing deltas.
std::vector<BlowupRow> blowup_study(const NonlocalWeights& w, const GridFn& f, const std::vector<double>& deltas,
                                    const SolveOpts& opts, const EigenPair& first);

struct LinearAntimax {
    double lambda1 = 0.0;
    double projection = 0.0;  ///< h sum f_i (w1)_i
    std::vector<ScanRow> above;  ///< lambda1 + delta
    std::vector<ScanRow> below;  ///< lambda1 - delta
    std::vector<std::string> violations;
    bool holds() const { return violations.empty(); }
};

/// Two-sided linear (p = 2) principle: with projection > 0, u < 0 above
/// lambda1 and u > 0 below; signs swap when projection < 0.
LinearAntimax verify_antimax_linear(const Grid1D& grid, double s, const GridFn& f,
                                    const std::vector<double>& delta_list,
                                    Quadrature rule = Quadrature::kCellCentered);

enum class SignSet { kNegative, kPositive };

struct SetMeasureSummary {
    double min_measure = 0.0;
    std::vector<std::size_t> violations;  ///< rows where the set is empty
    bool holds = false;                   ///< min_measure >= h
};

/// Minimum over rows of |Omega_-| (or |Omega_+| for the mirrored case).
SetMeasureSummary negative_set_report(const std::vector<ScanRow>& rows, const std::vector<double>& scalings,
                                      double h, SignSet side = SignSet::kNegative);

/// Rows for forcings t f, t in scalings, at fixed lambda >= lambda1.
std::vector<ScanRow> negative_set_scan(const NonlocalWeights& w, double lambda, const GridFn& f,
                                       const std::vector<double>& scalings, const SolveOpts& opts,
                                       const EigenPair& first, int threads = 1);

/// Header: lambda,s,p,n,min_u,max_u,meas_neg,meas_pos,norm_inf,iterations,converged,diverged
void write_scan_csv(std::ostream& os, const std::vector<ScanRow>& rows, const NonlocalWeights& w);
void write_blowup_csv(std::ostream& os, const std::vector<BlowupRow>& rows);

inline constexpr const char* kScanHeader =
    "lambda,s,p,n,min_u,max_u,meas_neg,meas_pos,norm_inf,iterations,converged,diverged";
inline constexpr const char* kBlowupHeader =
    "delta,lambda,norm_inf,log_slope,w1_distance,iterations,converged";

}  // namespace fraclab
