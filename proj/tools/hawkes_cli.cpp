// Experiment driver. Exit codes: 0 success, 1 usage error, 2 validation
// error, 3 failed acceptance or control check.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "hawkes/error.hpp"
#include "hawkes/harness/config.hpp"
#include "hawkes/harness/experiments.hpp"
#include "hawkes/harness/report.hpp"

namespace {

using namespace hawkes;
using namespace hawkes::harness;

constexpr int kExitUsage = 1;
constexpr int kExitValidation = 2;
constexpr int kExitCheck = 3;

struct Options {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out;
    std::optional<std::size_t> replicas;
};

std::ofstream open_out(const std::filesystem::path& dir, const std::string& name) {
    std::filesystem::create_directories(dir);
    std::ofstream os(dir / name);
    if (!os) throw ValidationError("cannot write " + (dir / name).string());
    return os;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open config file: " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run(const std::string& command, const Options& opt) {
    const std::string text = opt.config_path.empty() ? std::string() : read_file(opt.config_path);
    ExperimentConfig cfg =
        parse_config(text, opt.config_path.empty() ? std::filesystem::path()
                                                   : std::filesystem::path(opt.config_path).parent_path());
    if (opt.seed) {
        cfg.master_seed = *opt.seed;
    } else if (const char* env = std::getenv("SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (*env == '\0' || *end != '\0') throw ValidationError("SEED must be an unsigned integer");
        cfg.master_seed = v;
    }
    if (opt.out) cfg.output_dir = *opt.out;
    if (opt.replicas) {
        const std::size_t r = *opt.replicas;
        if (command == "simulate") cfg.simulate_replicas = r;
        else if (command == "sigma2") cfg.sigma2_replicas = r;
        else if (command == "lemmas") cfg.lemmas_replicas = r;
        else if (command == "malliavin") cfg.malliavin_replicas = r;
        else if (command == "discretize-error") cfg.discretize_replicas = r;
        else cfg.replicas = r;
        cfg.validate();
    }
    const auto& dir = cfg.output_dir;
    write_manifest(dir, command, text, cfg.master_seed);

    if (command == "constants") {
        std::ostringstream table;
        write_constants_csv(table, cfg.model);
        std::cout << table.str();
        open_out(dir, "constants.csv") << table.str();
        return 0;
    }
    if (command == "simulate") {
        auto paths = open_out(dir, "paths.csv");
        auto comp = open_out(dir, "compensator.csv");
        paths << "replica,tau,theta,mark,accepted\n";
        comp << "replica,t,Lambda\n";
        std::vector<double> grid(101);
        for (std::size_t j = 0; j < grid.size(); ++j) grid[j] = cfg.simulate_t * double(j) / 100.0;
        grid.back() = cfg.simulate_t;
        const double step = cfg.quad_step > 0.0 ? cfg.quad_step : default_quad_step(cfg.simulate_t);
        for (std::size_t r = 0; r < cfg.simulate_replicas; ++r) {
            const auto field =
                PoissonField::for_replica(cfg.master_seed, r, cfg.model.marks.distribution(), cfg.geometry);
            PathRecord path = simulate_path(cfg.model, cfg.simulate_t, field);
            attach_compensator_checkpoints(cfg.model, path, grid, step);
            for (const auto& c : path.candidates) {
                paths << r << ',' << fmt(c.t) << ',' << fmt(c.theta) << ',' << fmt(c.mark) << ','
                      << (c.accepted ? 1 : 0) << '\n';
            }
            for (std::size_t j = 0; j < grid.size(); ++j) {
                comp << r << ',' << fmt(path.checkpoint_times[j]) << ',' << fmt(path.compensator_checkpoints[j])
                     << '\n';
            }
        }
        return 0;
    }
    if (command == "sigma2") {
        const double burn = cfg.sigma2_burn_in >= 0.0 ? cfg.sigma2_burn_in : default_burn_in(cfg.model.kernel);
        const auto est = stationary_sigma2(cfg.model, burn, cfg.sigma2_horizon, cfg.sigma2_replicas,
                                           cfg.master_seed, cfg.geometry, cfg.quad_step, cfg.sigma2_stderr_tol);
        auto os = open_out(dir, "sigma2.csv");
        os << "sigma2,stderr,closed_form,precision_warning\n"
           << fmt(est.sigma2) << ',' << fmt(est.stderr_) << ',' << (est.closed_form ? fmt(*est.closed_form) : "")
           << ',' << (est.precision_warning ? 1 : 0) << '\n';
        if (est.precision_warning) std::cerr << "warning: sigma2 standard error above tolerance\n";
        std::cout << "sigma2 = " << fmt(est.sigma2) << " +- " << fmt(est.stderr_) << '\n';
        return 0;
    }
    if (command == "converge-marginal" || command == "converge-functional") {
        const bool functional = command == "converge-functional";
        const auto report = functional ? run_functional_convergence(cfg) : run_marginal_convergence(cfg);
        auto os = open_out(dir, functional ? "convergence_functional.csv" : "convergence_marginal.csv");
        write_convergence_csv(os, report);
        if (functional) {
            for (const auto& row : report.rows) {
                auto cell = open_out(dir, "functional_T" + fmt(row.horizon) + ".csv");
                write_functional_csv(cell, row.functional_detail);
            }
        }
        return 0;
    }
    if (command == "lemmas") {
        const auto report = run_lemma_checks(cfg);
        auto os = open_out(dir, "lemmas.csv");
        write_lemma_csv(os, report);
        return 0;
    }
    if (command == "malliavin") {
        const auto report = run_malliavin(cfg);
        auto os = open_out(dir, "malliavin.csv");
        write_derivative_csv(os, report.rows);
        auto theta = open_out(dir, "theta_irrelevance.csv");
        theta << "pairs_checked,pairs_identical\n" << report.pairs_checked << ',' << report.pairs_identical << '\n';
        if (!report.all_bounds_satisfied || report.pairs_identical != report.pairs_checked) {
            std::cerr << "malliavin check failed\n";
            return kExitCheck;
        }
        return 0;
    }
    if (command == "discretize-error") {
        const auto report = run_discretization(cfg);
        auto os = open_out(dir, "discretize.csv");
        write_discretize_csv(os, report);
        return 0;
    }
    return kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Simulation and verification driver for nonlinear compound marked Hawkes processes"};
    app.require_subcommand(1, 1);
    app.fallthrough();

    Options opt;
    std::uint64_t seed = 0;
    std::string out;
    std::size_t replicas = 0;
    app.add_option("--config", opt.config_path, "Experiment config file (key = value)");
    auto* seed_opt = app.add_option("--seed", seed, "Master seed (overrides SEED and the config)");
    auto* out_opt = app.add_option("--out", out, "Output directory");
    auto* rep_opt = app.add_option("--replicas", replicas, "Replica count for the subcommand");

    const std::vector<std::pair<std::string, std::string>> commands = {
        {"constants", "Print rho, resolvent L1 norm, moments and the mean-intensity bound"},
        {"simulate", "Simulate paths and write candidates and compensator checkpoints"},
        {"sigma2", "Estimate the stationary mean intensity"},
        {"converge-marginal", "Marginal W1 convergence of F_1 across the T grid"},
        {"converge-functional", "Functional lower bounds across the T grid"},
        {"lemmas", "Moment-bound shape checks over a (T, n) grid"},
        {"malliavin", "Derivative bound and threshold-irrelevance checks"},
        {"discretize-error", "Discretization error of Pi_n across n"},
    };
    for (const auto& [name, help] : commands) app.add_subcommand(name, help);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }
    if (seed_opt->count() > 0) opt.seed = seed;
    if (out_opt->count() > 0) opt.out = out;
    if (rep_opt->count() > 0) opt.replicas = replicas;

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        return run(command, opt);
    } catch (const ControlFailure& e) {
        std::cerr << "control check failed: " << e.what() << '\n';
        return kExitCheck;
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const ExplosionError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }
}
