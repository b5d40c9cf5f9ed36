#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "balltrace/config.hpp"
#include "balltrace/experiments.hpp"

int run_selftest(unsigned long seed);

namespace {

struct CliOptions {
    std::string config_path;
    std::string experiment;
    std::string out_dir;
    std::string format = "csv";
    int workers = 0;
    long seed = -1;
    bool override_budget = false;
    bool plot = false;
};

int execute(const CliOptions& opt) {
    using namespace balltrace;

    ExperimentConfig cfg = load_config(opt.config_path);
    if (!opt.experiment.empty()) {
        if (cfg.experiment.empty())
            cfg.experiment = opt.experiment;
        else if (cfg.experiment != opt.experiment)
            throw ConfigError("config declares experiment '" + cfg.experiment +
                              "' but the command line says '" + opt.experiment + "'");
    }
    if (!opt.out_dir.empty()) cfg.out_dir = opt.out_dir;
    if (opt.workers > 0) cfg.workers = opt.workers;
    if (opt.seed >= 0) cfg.seed = static_cast<unsigned long>(opt.seed);
    if (opt.override_budget) cfg.override_budget = true;
    validate(cfg);

    const VerificationReport rep = run(cfg);

    namespace fs = std::filesystem;
    fs::create_directories(cfg.out_dir);
    const std::string base = (fs::path(cfg.out_dir) / rep.experiment).string();
    const std::string main_path = base + (opt.format == "json" ? ".json" : ".csv");
    {
        std::ofstream out(main_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + main_path + "'");
        if (opt.format == "json")
            write_json(rep, out);
        else
            write_csv(rep, out);
        if (!out) throw std::runtime_error("write failed for '" + main_path + "'");
    }
    std::string files = main_path;
    if (opt.plot) {
        const std::string plot_path = base + "_plot.csv";
        std::ofstream out(plot_path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write '" + plot_path + "'");
        write_plot_data(rep, out);
        if (!out) throw std::runtime_error("write failed for '" + plot_path + "'");
        files += ", " + plot_path;
    }

    std::size_t passed = 0;
    for (const ReportRow& r : rep.rows) {
        if (r.pass) ++passed;
        std::printf("%s  t=%g  N=%d  lhs=%.10g  rhs=%.10g  |diff|=%.3g  %s\n",
                    rep.experiment.c_str(), r.t, r.N, r.lhs_extrapolated, r.rhs, r.abs_diff,
                    r.pass ? "pass" : "FAIL");
    }
    std::printf("%s: %zu/%zu rows pass, wrote %s (%.2f s)\n", rep.experiment.c_str(), passed,
                rep.rows.size(), files.c_str(), rep.wall_seconds);
    return rep.all_pass() ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite-section trace identities for Toeplitz operators on the unit ball"};
    app.require_subcommand(1);

    CliOptions opt;
    unsigned long selftest_seed = 1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", opt.config_path, "experiment config file")->required();
        sub->add_option("--out-dir", opt.out_dir, "output directory (default from config)");
        sub->add_option("--format", opt.format, "report format")
            ->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--workers", opt.workers, "concurrent (t, N) cells");
        sub->add_option("--seed", opt.seed, "seed recorded in the report metadata");
        sub->add_flag("--override-budget", opt.override_budget,
                      "attempt grids whose estimated basis size exceeds the budget");
    };

    CLI::App* verify = app.add_subcommand("verify", "run one experiment against its target");
    verify->add_option("experiment", opt.experiment, "experiment id")->required();
    add_common(verify);

    CLI::App* sweep = app.add_subcommand("sweep", "run the (t, N) grid and emit plot data");
    add_common(sweep);

    CLI::App* selftest = app.add_subcommand("selftest", "run the built-in invariant suites");
    selftest->add_option("--seed", selftest_seed, "sample seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (selftest->parsed()) return run_selftest(selftest_seed);
        opt.plot = sweep->parsed();
        return execute(opt);
    } catch (const balltrace::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const balltrace::BudgetError& e) {
        std::cerr << "resource error: " << e.what() << '\n';
        return 3;
    } catch (const balltrace::QuadratureError& e) {
        std::cerr << "verification error: " << e.what() << '\n';
        return 1;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::domain_error& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::bad_alloc&) {
        std::cerr << "resource error: out of memory\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
