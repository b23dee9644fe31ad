#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "fraclab/config.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Fractional p-Laplacian laboratory"};
    std::string config_path;
    std::string out_dir = "out";
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    app.add_option("--config", config_path, "Run configuration (key = value lines)")->required();
    app.add_option("--out", out_dir, "Output directory");
    app.add_option("--seed", seed, "Seed for randomized restarts");
    app.add_option("--threads", threads, "Worker threads (0 = hardware default)");
    CLI11_PARSE(app, argc, argv);

    std::ifstream in(config_path);
    if (!in) {
        std::cerr << "cannot open " << config_path << "\n";
        return fraclab::kExitConfigError;
    }
    std::stringstream text;
    text << in.rdbuf();

    fraclab::RunConfig config;
    try {
        config = fraclab::parse_config(text.str());
    } catch (const fraclab::ConfigError& e) {
        std::cerr << config_path << ": " << e.what() << "\n";
        return fraclab::kExitConfigError;
    }

    fraclab::RunOptions options;
    options.out_dir = out_dir;
    options.seed = seed;
    options.threads = threads;
    const int status = fraclab::run(config, options);
    if (status != fraclab::kExitOk) std::cerr << "status " << status << ", see " << out_dir << "/error.json\n";
    return status;
}
