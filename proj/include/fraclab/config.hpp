#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fraclab/nonlocal_operator.hpp"
#include "fraclab/solver.hpp"

namespace fraclab {

/// Configuration problems: syntax errors carry the line, validation errors
/// name the key.
class ConfigError : public std::runtime_error {
public:
    ConfigError(const std::string& message, int line = 0, std::string key = {})
        : std::runtime_error(message), line_(line), key_(std::move(key)) {}
    int line() const { return line_; }
    const std::string& key() const { return key_; }

private:
    int line_;
    std::string key_;
};

enum class Command { kEigen, kSolve, kScanAntimax, kBlowup, kVerifyMax, kVerifyAntimaxLinear, kOracle };

const char* command_name(Command c);

struct Forcing {
    enum class Kind { kConstant, kEigen1, kFile } kind = Kind::kConstant;
    double value = 1.0;  ///< for kConstant
    std::string path;    ///< for kFile
};

/// A list of lambdas/eps/deltas, either absolute or in units of lambda1.
struct ValueList {
    std::vector<double> values;
    bool relative = false;
};

enum class SolveMethod { kAuto, kSubcritical, kHomotopy, kLinear };

struct RunConfig {
    Command command = Command::kEigen;
    double a = 0.0;
    double b = 1.0;
    int n = 64;
    double s = 0.5;
    double p = 2.0;
    Quadrature quadrature = Quadrature::kCellCentered;
    std::optional<double> lambda;
    ValueList lambdas;
    ValueList eps;
    ValueList deltas;
    std::vector<double> scalings;
    Forcing forcing;
    SolveOpts opts;
    SolveMethod method = SolveMethod::kAuto;
    int knots = 21;
    bool eigen2 = false;
    int modes = 2;
    int restarts = 0;
    std::uint64_t seed = 0;
    int threads = 0;
};

/// Line-oriented "key = value" with '#' comments. Unknown keys are errors.
RunConfig parse_config(const std::string& text);

struct RunOptions {
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;  ///< overrides the config seed
    std::optional<int> threads;         ///< overrides the config; 0 = hardware default
};

enum ExitStatus : int {
    kExitOk = 0,
    kExitSolverFailure = 1,
    kExitFalsified = 2,
    kExitConfigError = 3,
};

/// Executes the configured command and writes its artifacts plus run.json
/// (and error.json on failure) into out_dir.
int run(const RunConfig& config, const RunOptions& options);

}  // namespace fraclab
