#include <CLI11.hpp>
#include <iostream>

#include "subeq/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"subeq - margin-function calculus for fully nonlinear second-order "
                 "constraint sets"};
    std::string config_path;
    std::string out_dir;
    std::string seed;
    bool quiet = false;
    app.add_option("--config", config_path, "run configuration (flat key=value or JSON)")
        ->required();
    app.add_option("--seed", seed, "override the configured RNG seed (u64)");
    app.add_option("--out", out_dir, "output directory for CSV/JSON artifacts");
    app.add_flag("--quiet", quiet, "suppress the report echo on stdout");
    CLI11_PARSE(app, argc, argv);

    try {
        subeq::RunConfig cfg = subeq::load_config_file(config_path);
        if (!seed.empty()) cfg.set("seed", seed);
        if (!out_dir.empty()) cfg.set("out", out_dir);
        if (quiet) cfg.set("quiet", "1");
        return subeq::run(cfg, std::cout, std::cerr);
    } catch (const subeq::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    }
}
