#include "fraclab/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "fraclab/dense.hpp"
#include "fraclab/eigen.hpp"
#include "fraclab/experiments.hpp"

namespace fraclab {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

const char* command_name(Command c) {
    switch (c) {
        case Command::kEigen: return "eigen";
        case Command::kSolve: return "solve";
        case Command::kScanAntimax: return "scan-antimax";
        case Command::kBlowup: return "blowup";
        case Command::kVerifyMax: return "verify-max";
        case Command::kVerifyAntimaxLinear: return "verify-antimax-linear";
        case Command::kOracle: return "oracle";
    }
    return "?";
}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_real(const std::string& text, const std::string& key, int line) {
    const std::string t = trim(text);
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(t.c_str(), &end);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE || !std::isfinite(v)) {
        throw ConfigError("line " + std::to_string(line) + ": " + key + " expects a number, got '" + t + "'",
                          line, key);
    }
    return v;
}

long long to_integer(const std::string& text, const std::string& key, int line) {
    const std::string t = trim(text);
    char* end = nullptr;
    errno = 0;
    const long long v = std::strtoll(t.c_str(), &end, 10);
    if (t.empty() || end != t.c_str() + t.size() || errno == ERANGE) {
        throw ConfigError("line " + std::to_string(line) + ": " + key + " expects an integer, got '" + t + "'",
                          line, key);
    }
    return v;
}

std::vector<double> to_list(const std::string& text, const std::string& key, int line) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_real(item, key, line));
    if (out.empty()) throw ConfigError("line " + std::to_string(line) + ": " + key + " is empty", line, key);
    return out;
}

bool to_bool(const std::string& text, const std::string& key, int line) {
    const std::string t = trim(text);
    if (t == "true" || t == "1" || t == "yes") return true;
    if (t == "false" || t == "0" || t == "no") return false;
    throw ConfigError("line " + std::to_string(line) + ": " + key + " expects true/false", line, key);
}

Command to_command(const std::string& t, int line) {
    static const std::map<std::string, Command> names = {
        {"eigen", Command::kEigen},
        {"solve", Command::kSolve},
        {"scan-antimax", Command::kScanAntimax},
        {"blowup", Command::kBlowup},
        {"verify-max", Command::kVerifyMax},
        {"verify-antimax-linear", Command::kVerifyAntimaxLinear},
        {"oracle", Command::kOracle},
    };
    const auto it = names.find(t);
    if (it == names.end()) throw ConfigError("line " + std::to_string(line) + ": unknown command '" + t + "'", line, "command");
    return it->second;
}

Forcing to_forcing(const std::string& t, int line) {
    Forcing f;
    if (t == "eigen1") {
        f.kind = Forcing::Kind::kEigen1;
    } else if (t.rfind("const:", 0) == 0) {
        f.kind = Forcing::Kind::kConstant;
        f.value = to_real(t.substr(6), "forcing", line);
    } else if (t.rfind("custom-file:", 0) == 0) {
        f.kind = Forcing::Kind::kFile;
        f.path = trim(t.substr(12));
        if (f.path.empty() || !fs::exists(f.path)) {
            throw ConfigError("line " + std::to_string(line) + ": forcing file '" + f.path + "' does not exist", line,
                              "forcing");
        }
    } else {
        throw ConfigError("line " + std::to_string(line) + ": forcing must be const:<c>, eigen1 or custom-file:<path>",
                          line, "forcing");
    }
    return f;
}

void fail(const std::string& key, const std::string& message) { throw ConfigError(message, 0, key); }

void validate(const RunConfig& c, const std::map<std::string, int>& seen) {
    if (!seen.count("command")) fail("command", "command is required");
    if (!(c.s > 0.0 && c.s < 1.0)) fail("s", "s must lie in (0,1)");
    if (!(c.p > 1.0)) fail("p", "p must be greater than 1");
    if (c.n < 1) fail("n", "n must be at least 1");
    if (!(c.a < c.b)) fail("a", "a must be less than b");
    try {
        c.opts.validate();
    } catch (const DomainError& e) {
        fail("opts", e.what());
    }
    if (c.knots < 3) fail("knots", "knots must be at least 3");
    if (c.restarts < 0) fail("restarts", "restarts must be non-negative");
    if (c.threads < 0) fail("threads", "threads must be non-negative");

    auto need_list = [&](const ValueList& list, const char* abs_key, const char* rel_key) {
        if (list.values.empty()) fail(abs_key, std::string(abs_key) + " or " + rel_key + " is required");
        if (seen.count(abs_key) && seen.count(rel_key)) {
            fail(rel_key, std::string(abs_key) + " and " + rel_key + " are mutually exclusive");
        }
    };
    switch (c.command) {
        case Command::kSolve:
            if (!c.lambda) fail("lambda", "lambda is required for solve");
            if (c.method == SolveMethod::kLinear && c.p != 2.0) fail("method", "method = linear requires p = 2");
            break;
        case Command::kScanAntimax:
            need_list(c.eps, "eps", "eps_rel");
            for (double e : c.eps.values)
                if (!(e > 0.0)) fail("eps", "eps values must be positive");
            break;
        case Command::kBlowup:
            need_list(c.deltas, "deltas", "deltas_rel");
            for (double d : c.deltas.values)
                if (!(d > 0.0)) fail("deltas", "deltas must be positive");
            break;
        case Command::kVerifyMax:
            need_list(c.lambdas, "lambdas", "lambdas_rel");
            break;
        case Command::kVerifyAntimaxLinear:
            if (c.p != 2.0) fail("p", "verify-antimax-linear requires p = 2");
            need_list(c.deltas, "deltas", "deltas_rel");
            for (double d : c.deltas.values)
                if (!(d > 0.0)) fail("deltas", "deltas must be positive");
            break;
        case Command::kOracle:
            if (c.p != 2.0) fail("p", "oracle requires p = 2");
            if (c.modes < 1 || c.modes > c.n) fail("modes", "modes must lie in [1, n]");
            break;
        case Command::kEigen:
            break;
    }
    if (!c.scalings.empty()) {
        for (double t : c.scalings)
            if (!(t > 0.0)) fail("scalings", "scalings must be positive");
    }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
    RunConfig c;
    std::map<std::string, int> seen;
    using Setter = std::function<void(const std::string&, int)>;
    const std::map<std::string, Setter> setters = {
        {"command", [&](const std::string& v, int l) { c.command = to_command(v, l); }},
        {"a", [&](const std::string& v, int l) { c.a = to_real(v, "a", l); }},
        {"b", [&](const std::string& v, int l) { c.b = to_real(v, "b", l); }},
        {"n", [&](const std::string& v, int l) { c.n = static_cast<int>(to_integer(v, "n", l)); }},
        {"s", [&](const std::string& v, int l) { c.s = to_real(v, "s", l); }},
        {"p", [&](const std::string& v, int l) { c.p = to_real(v, "p", l); }},
        {"quadrature",
         [&](const std::string& v, int l) {
             if (v == "cell") c.quadrature = Quadrature::kCellCentered;
             else if (v == "nodal") c.quadrature = Quadrature::kNodal;
             else throw ConfigError("line " + std::to_string(l) + ": quadrature must be cell or nodal", l, "quadrature");
         }},
        {"lambda", [&](const std::string& v, int l) { c.lambda = to_real(v, "lambda", l); }},
        {"lambdas", [&](const std::string& v, int l) { c.lambdas = {to_list(v, "lambdas", l), false}; }},
        {"lambdas_rel", [&](const std::string& v, int l) { c.lambdas = {to_list(v, "lambdas_rel", l), true}; }},
        {"eps", [&](const std::string& v, int l) { c.eps = {to_list(v, "eps", l), false}; }},
        {"eps_rel", [&](const std::string& v, int l) { c.eps = {to_list(v, "eps_rel", l), true}; }},
        {"deltas", [&](const std::string& v, int l) { c.deltas = {to_list(v, "deltas", l), false}; }},
        {"deltas_rel", [&](const std::string& v, int l) { c.deltas = {to_list(v, "deltas_rel", l), true}; }},
        {"scalings", [&](const std::string& v, int l) { c.scalings = to_list(v, "scalings", l); }},
        {"forcing", [&](const std::string& v, int l) { c.forcing = to_forcing(v, l); }},
        {"tol", [&](const std::string& v, int l) { c.opts.tol = to_real(v, "tol", l); }},
        {"max_iters", [&](const std::string& v, int l) { c.opts.max_iters = static_cast<int>(to_integer(v, "max_iters", l)); }},
        {"step0", [&](const std::string& v, int l) { c.opts.step0 = to_real(v, "step0", l); }},
        {"armijo", [&](const std::string& v, int l) { c.opts.armijo = to_real(v, "armijo", l); }},
        {"radius", [&](const std::string& v, int l) { c.opts.radius = to_real(v, "radius", l); }},
        {"relax", [&](const std::string& v, int l) { c.opts.relax = to_real(v, "relax", l); }},
        {"t_steps", [&](const std::string& v, int l) { c.opts.t_steps = static_cast<int>(to_integer(v, "t_steps", l)); }},
        {"memory", [&](const std::string& v, int l) { c.opts.memory = static_cast<int>(to_integer(v, "memory", l)); }},
        {"method",
         [&](const std::string& v, int l) {
             if (v == "auto") c.method = SolveMethod::kAuto;
             else if (v == "subcritical") c.method = SolveMethod::kSubcritical;
             else if (v == "homotopy") c.method = SolveMethod::kHomotopy;
             else if (v == "linear") c.method = SolveMethod::kLinear;
             else throw ConfigError("line " + std::to_string(l) + ": unknown method '" + v + "'", l, "method");
         }},
        {"knots", [&](const std::string& v, int l) { c.knots = static_cast<int>(to_integer(v, "knots", l)); }},
        {"eigen2", [&](const std::string& v, int l) { c.eigen2 = to_bool(v, "eigen2", l); }},
        {"modes", [&](const std::string& v, int l) { c.modes = static_cast<int>(to_integer(v, "modes", l)); }},
        {"restarts", [&](const std::string& v, int l) { c.restarts = static_cast<int>(to_integer(v, "restarts", l)); }},
        {"seed", [&](const std::string& v, int l) { c.seed = static_cast<std::uint64_t>(to_integer(v, "seed", l)); }},
        {"threads", [&](const std::string& v, int l) { c.threads = static_cast<int>(to_integer(v, "threads", l)); }},
    };

    std::istringstream is(text);
    std::string raw;
    int line = 0;
    while (std::getline(is, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string body = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(line) + ": expected 'key = value'", line);
        }
        const std::string key = trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        const auto it = setters.find(key);
        if (it == setters.end()) {
            throw ConfigError("line " + std::to_string(line) + ": unknown key '" + key + "'", line, key);
        }
        if (seen.count(key)) {
            throw ConfigError("line " + std::to_string(line) + ": duplicate key '" + key + "'", line, key);
        }
        if (value.empty()) {
            throw ConfigError("line " + std::to_string(line) + ": missing value for '" + key + "'", line, key);
        }
        seen[key] = line;
        it->second(value, line);
    }
    validate(c, seen);
    return c;
}

namespace {

Json number_or_null(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

Json rows_json(const std::vector<ScanRow>& rows) {
    Json arr = Json::array();
    for (const ScanRow& r : rows) {
        arr.push_back({{"lambda", r.lambda},
                       {"min_u", r.min_u},
                       {"max_u", r.max_u},
                       {"meas_neg", r.meas_neg},
                       {"meas_pos", r.meas_pos},
                       {"converged", r.converged},
                       {"diverged", r.diverged}});
    }
    return arr;
}

class Runner {
public:
    Runner(const RunConfig& config, const RunOptions& options)
        : cfg_(config),
          out_(options.out_dir),
          seed_(options.seed.value_or(config.seed)),
          threads_(options.threads.value_or(config.threads)),
          grid_(config.a, config.b, config.n),
          weights_(build_weights(FracParams::make(1, config.s, config.p), grid_, config.quadrature)) {
        if (threads_ == 0) threads_ = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    }

    int execute() {
        switch (cfg_.command) {
            case Command::kEigen: return eigen();
            case Command::kSolve: return solve();
            case Command::kScanAntimax: return scan_antimax_cmd();
            case Command::kBlowup: return blowup();
            case Command::kVerifyMax: return verify_max();
            case Command::kVerifyAntimaxLinear: return verify_linear();
            case Command::kOracle: return oracle();
        }
        return kExitConfigError;
    }

    const std::vector<std::string>& artifacts() const { return artifacts_; }
    const Json& summary() const { return summary_; }

private:
    std::string path(const std::string& name) const { return (out_ / name).string(); }

    void write_text(const std::string& name, const std::string& text) {
        std::ofstream os(path(name));
        if (!os) throw std::runtime_error("cannot write " + path(name));
        os << text;
        if (text.empty() || text.back() != '\n') os << '\n';
        artifacts_.push_back(name);
    }

    void write_fn(const std::string& name, const GridFn& u) {
        write_csv(path(name), u);
        artifacts_.push_back(name);
    }

    void write_scan(const std::string& name, const std::vector<ScanRow>& rows) {
        std::ostringstream os;
        write_scan_csv(os, rows, weights_);
        write_text(name, os.str());
    }

    const EigenPair& first() {
        if (!first_) {
            first_ = lambda1_solve(weights_, cfg_.opts);
            if (!first_->converged) throw ConvergenceError("first eigenpair did not converge");
        }
        return *first_;
    }

    GridFn forcing() {
        switch (cfg_.forcing.kind) {
            case Forcing::Kind::kConstant: return GridFn::constant(grid_, cfg_.forcing.value);
            case Forcing::Kind::kEigen1: return first().fn;
            case Forcing::Kind::kFile: return read_csv(cfg_.forcing.path, grid_);
        }
        return GridFn(grid_);
    }

    std::vector<double> scaled(const ValueList& list, double lambda1) const {
        std::vector<double> out = list.values;
        if (list.relative)
            for (double& v : out) v *= lambda1;
        return out;
    }

    int eigen() {
        const EigenPair& e = first();
        write_text("eigen1.json", eigen_json(e, weights_));
        write_fn("eigen1.csv", e.fn);
        summary_["lambda1"] = e.value;
        int status = kExitOk;
        if (e.fn.min() <= 0.0) {
            summary_["violation"] = "first eigenfunction is not strictly positive";
            status = kExitFalsified;
        }
        if (cfg_.eigen2) {
            const PathResult path = lambda2_path(weights_, e, cfg_.knots, cfg_.opts);
            Json j;
            j["value"] = path.value;
            j["lambda1"] = e.value;
            j["knots"] = cfg_.knots;
            j["top"] = path.top;
            j["iterations"] = path.iterations;
            j["converged"] = path.converged;
            write_text("eigen2.json", j.dump(2));
            summary_["lambda2_bound"] = path.value;
            if (!(path.value > e.value)) {
                summary_["violation"] = "second eigenvalue bound does not exceed lambda1";
                status = kExitFalsified;
            } else if (!path.converged && status == kExitOk) {
                status = kExitSolverFailure;
            }
        }
        return status;
    }

    int solve() {
        const double lambda = *cfg_.lambda;
        const GridFn f = forcing();
        SolveMethod method = cfg_.method;
        if (method == SolveMethod::kAuto) {
            method = lambda < first().value ? SolveMethod::kSubcritical : SolveMethod::kHomotopy;
        }
        SolveReport r = [&] {
            switch (method) {
                case SolveMethod::kLinear: return solve_linear(weights_, lambda, f);
                case SolveMethod::kHomotopy: return solve_homotopy(weights_, lambda, f, cfg_.opts, first());
                default: return solve_subcritical(weights_, lambda, f, cfg_.opts);
            }
        }();
        Json j = Json::parse(report_json(r, weights_));
        const char* names[] = {"auto", "subcritical", "homotopy", "linear"};
        j["method"] = names[static_cast<int>(method)];
        if (cfg_.restarts > 0 && method == SolveMethod::kSubcritical) {
            std::mt19937_64 rng(seed_);
            std::uniform_real_distribution<double> unit(-1.0, 1.0);
            const double scale = std::max(1.0, r.solution.norm_inf());
            double spread = 0.0;
            for (int k = 0; k < cfg_.restarts; ++k) {
                GridFn start(grid_);
                for (int i = 0; i < start.size(); ++i) start[i] = scale * unit(rng);
                const SolveReport again = solve_subcritical(weights_, lambda, f, cfg_.opts, start);
                spread = std::max(spread, (again.solution - r.solution).norm_inf());
            }
            j["restart_spread"] = spread;
        }
        write_text("solve.json", j.dump(2));
        write_fn("solve.csv", r.solution);
        return r.converged && !r.diverged ? kExitOk : kExitSolverFailure;
    }

    int finish_scan(const SignedScan& scan, Json j) {
        j["violations"] = scan.violations;
        j["failures"] = scan.failures;
        summary_["violations"] = scan.violations;
        if (!scan.violations.empty()) return kExitFalsified;
        const bool any = std::any_of(scan.forward.begin(), scan.forward.end(), [](const ScanRow& r) { return r.converged; });
        return any ? kExitOk : kExitSolverFailure;
    }

    int scan_antimax_cmd() {
        const GridFn f = forcing();
        const Spectrum spectrum{first(), lambda2_path(weights_, first(), cfg_.knots, cfg_.opts).value};
        const std::vector<double> eps = scaled(cfg_.eps, spectrum.first.value);
        const SignedScan scan = scan_antimax(weights_, f, eps, cfg_.opts, spectrum, threads_);
        write_scan("scan_antimax.csv", scan.forward);
        write_scan("scan_antimax_mirrored.csv", scan.mirrored);
        Json j;
        j["lambda1"] = spectrum.first.value;
        j["lambda2_bound"] = spectrum.lambda2;
        j["forward"] = rows_json(scan.forward);
        j["mirrored"] = rows_json(scan.mirrored);
        j["violations"] = scan.violations;
        j["failures"] = scan.failures;
        j["note"] = "one solution per lambda is found; other solutions, if any, are not examined";
        if (!cfg_.scalings.empty()) {
            // |Omega_-| for t f at the smallest eps.
            const double lambda = spectrum.first.value + *std::min_element(eps.begin(), eps.end());
            const auto rows = negative_set_scan(weights_, lambda, f, cfg_.scalings, cfg_.opts, spectrum.first, threads_);
            const SetMeasureSummary m = negative_set_report(rows, cfg_.scalings, grid_.h());
            write_scan("negative_set.csv", rows);
            j["negative_set"] = {{"lambda", lambda},
                                 {"scalings", cfg_.scalings},
                                 {"min_measure", m.min_measure},
                                 {"violations", m.violations},
                                 {"holds", m.holds}};
        }
        write_text("scan_antimax.json", j.dump(2));
        return finish_scan(scan, j);
    }

    int blowup() {
        const GridFn f = forcing();
        const EigenPair& e = first();
        const std::vector<double> deltas = scaled(cfg_.deltas, e.value);
        const std::vector<BlowupRow> rows = blowup_study(weights_, f, deltas, cfg_.opts, e);
        std::ostringstream os;
        write_blowup_csv(os, rows);
        write_text("blowup.csv", os.str());

        const SolveReport resonant = solve_homotopy(weights_, e.value, f, cfg_.opts, e);
        Json j;
        j["lambda1"] = e.value;
        Json arr = Json::array();
        bool increasing = true;
        bool all_converged = true;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            arr.push_back({{"delta", rows[k].delta},
                           {"norm_inf", rows[k].norm_inf},
                           {"log_slope", number_or_null(rows[k].log_slope)},
                           {"w1_distance", rows[k].w1_distance},
                           {"converged", rows[k].converged}});
            all_converged = all_converged && rows[k].converged;
            if (k > 0 && !(rows[k].norm_inf > rows[k - 1].norm_inf)) increasing = false;
        }
        j["rows"] = arr;
        j["expected_slope"] = -1.0 / (cfg_.p - 1.0);
        j["norm_increasing"] = increasing;
        j["resonant_diverged"] = resonant.diverged;
        j["resonant_converged"] = resonant.converged;
        write_text("blowup.json", j.dump(2));
        summary_["resonant_diverged"] = resonant.diverged;
        if (!all_converged) return kExitSolverFailure;
        if (!increasing || resonant.converged) return kExitFalsified;
        return kExitOk;
    }

    int verify_max() {
        const GridFn f = forcing();
        const EigenPair& e = first();
        const std::vector<double> lambdas = scaled(cfg_.lambdas, e.value);
        const SignedScan scan = verify_max_principle(weights_, lambdas, f, cfg_.opts, e, threads_);
        write_scan("verify_max.csv", scan.forward);
        write_scan("verify_max_mirrored.csv", scan.mirrored);
        Json j;
        j["lambda1"] = e.value;
        j["forward"] = rows_json(scan.forward);
        j["mirrored"] = rows_json(scan.mirrored);
        j["violations"] = scan.violations;
        j["failures"] = scan.failures;
        write_text("verify_max.json", j.dump(2));
        summary_["violations"] = scan.violations;
        if (!scan.failures.empty()) return kExitSolverFailure;
        return scan.violations.empty() ? kExitOk : kExitFalsified;
    }

    int verify_linear() {
        const GridFn f = forcing();
        double lambda1 = 1.0;
        if (cfg_.deltas.relative) lambda1 = eigens_linear(weights_, 1).front().value;
        const std::vector<double> deltas = scaled(cfg_.deltas, lambda1);
        const LinearAntimax res = verify_antimax_linear(grid_, cfg_.s, f, deltas, cfg_.quadrature);
        write_scan("antimax_linear_above.csv", res.above);
        write_scan("antimax_linear_below.csv", res.below);
        Json j;
        j["lambda1"] = res.lambda1;
        j["projection"] = res.projection;
        j["statement"] = res.projection > 0.0 ? 1 : 2;
        j["above"] = rows_json(res.above);
        j["below"] = rows_json(res.below);
        j["violations"] = res.violations;
        write_text("antimax_linear.json", j.dump(2));
        summary_["violations"] = res.violations;
        return res.holds() ? kExitOk : kExitFalsified;
    }

    int oracle() {
        const std::vector<EigenPair> eig = eigens_linear(weights_, cfg_.modes);
        Json j;
        Json values = Json::array();
        Json residuals = Json::array();
        for (std::size_t k = 0; k < eig.size(); ++k) {
            values.push_back(eig[k].value);
            residuals.push_back(eig[k].residual);
            write_fn("oracle_" + std::to_string(k + 1) + ".csv", eig[k].fn);
        }
        j["values"] = values;
        j["residuals"] = residuals;
        write_text("oracle.json", j.dump(2));
        return kExitOk;
    }

    const RunConfig& cfg_;
    fs::path out_;
    std::uint64_t seed_;
    int threads_;
    Grid1D grid_;
    NonlocalWeights weights_;
    std::optional<EigenPair> first_;
    std::vector<std::string> artifacts_;
    Json summary_ = Json::object();
};

void write_error(const fs::path& out, const std::string& kind, const std::string& message, int status) {
    std::ofstream os(out / "error.json");
    Json j;
    j["status"] = status;
    j["kind"] = kind;
    j["message"] = message;
    os << j.dump(2) << '\n';
}

}  // namespace

int run(const RunConfig& config, const RunOptions& options) {
    const fs::path out(options.out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) return kExitConfigError;
    fs::remove(out / "error.json", ec);

    int status = kExitOk;
    std::vector<std::string> artifacts;
    Json summary = Json::object();
    try {
        Runner runner(config, options);
        status = runner.execute();
        artifacts = runner.artifacts();
        summary = runner.summary();
    } catch (const ConfigError& e) {
        status = kExitConfigError;
        write_error(out, "config", e.what(), status);
    } catch (const DomainError& e) {
        status = kExitConfigError;
        write_error(out, "precondition", e.what(), status);
    } catch (const std::exception& e) {
        status = kExitSolverFailure;
        write_error(out, "solver", e.what(), status);
    }
    if (status == kExitFalsified || (status == kExitSolverFailure && !fs::exists(out / "error.json"))) {
        write_error(out, status == kExitFalsified ? "falsified" : "solver",
                    summary.contains("violations") ? summary["violations"].dump() : "see run.json", status);
    }
    Json run_json;
    run_json["command"] = command_name(config.command);
    run_json["status"] = status;
    run_json["seed"] = options.seed.value_or(config.seed);
    run_json["artifacts"] = artifacts;
    run_json["summary"] = summary;
    std::ofstream os(out / "run.json");
    os << run_json.dump(2) << '\n';
    return status;
}

}  // namespace fraclab
