// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "hawkes/harness/config.hpp"
#include "hawkes/harness/experiments.hpp"
#include "hawkes/kernel.hpp"
#include "hawkes/parallel.hpp"
#include "hawkes/rescaler.hpp"
#include "hawkes/simulator.hpp"
#include "hawkes/stats.hpp"
#include "hawkes/wasserstein.hpp"

using namespace hawkes;
using namespace hawkes::harness;

namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

struct Criterion {
    int id;
    const char* name;
    double budget_s;
    std::function<Outcome()> run;
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

ExperimentConfig config(const char* name) { return load_config(fs::path(HAWKES_CONFIG_DIR) / name); }

double phi_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

// Antiderivative of Phi.
double phi_anti(double x) { return x * phi_cdf(x) + std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI); }

// int_a^b |c - Phi(x)| dx for a constant c in [0, 1].
double abs_gap_integral(double c, double a, double b) {
    double lo = a, hi = b;  // Phi(q) = c, clamped to [a, b]
    for (int i = 0; i < 200 && hi > lo; ++i) {
        const double mid = 0.5 * (lo + hi);
        (phi_cdf(mid) < c ? lo : hi) = mid;
    }
    const double q = 0.5 * (lo + hi);
    return c * (q - a) - (phi_anti(q) - phi_anti(a)) + (phi_anti(b) - phi_anti(q)) - c * (b - q);
}

// W1 between (Pois(m) - m)/sqrt(m) and N(0, 1) as int |F - Phi|.
double poisson_normal_w1(double m) {
    const double s = std::sqrt(m);
    const std::size_t kmax = std::size_t(m + 40.0 * s + 40.0);
    double cdf = 0.0;
    double total = 0.0;
    const double lo = (0.0 - m) / s;
    // Left tail: F = 0 below the first atom.
    total += phi_anti(lo);
    for (std::size_t k = 0; k < kmax; ++k) {
        cdf += std::exp(double(k) * std::log(m) - m - std::lgamma(double(k) + 1.0));
        const double a = (double(k) - m) / s;
        const double b = (double(k + 1) - m) / s;
        total += abs_gap_integral(std::min(cdf, 1.0), a, b);
    }
    return total;
}

Outcome c1_poisson_control() {
    const auto cfg = config("poisson.cfg");
    const auto rep = run_marginal_convergence(cfg);
    bool decreasing = true;
    std::ostringstream os;
    os << "W1 at T = ";
    for (std::size_t k = 0; k < rep.rows.size(); ++k) {
        if (k > 0 && !(rep.rows[k].marginal_w1 < rep.rows[k - 1].marginal_w1)) decreasing = false;
        os << num(rep.rows[k].horizon) << ": " << num(rep.rows[k].marginal_w1) << "  ";
    }
    const double last = rep.rows.back().marginal_w1;
    os << "(exact Pois/normal W1 at T = 800: " << num(poisson_normal_w1(800.0)) << ")";
    return {decreasing && last < 0.05 && rep.rows.back().horizon == 800.0, os.str()};
}

Outcome c2_linear_mean_intensity() {
    const auto cfg = config("linear.cfg");
    const Model& m = cfg.model;
    const double horizon = 2000.0;
    const std::size_t reps = 1000;
    std::vector<double> rate(reps);
    parallel_for(reps, [&](std::size_t r) {
        SimulationOptions opt;
        opt.record_candidates = false;
        const auto field = PoissonField::for_replica(cfg.master_seed, r, m.marks.distribution());
        const auto path = simulate_path(m, horizon, field, opt);
        rate[r] = double(path.events.size()) / horizon;
    });
    const auto s = summarize(rate);
    const auto sig = stationary_sigma2(m, default_burn_in(m.kernel), cfg.sigma2_horizon, cfg.sigma2_replicas,
                                       cfg.master_seed + 1);
    const bool mean_ok = std::abs(s.mean - 2.0) <= 4.0 * s.stderr_;
    const bool sig_ok = std::abs(sig.sigma2 - 2.0) <= 4.0 * sig.stderr_;
    std::ostringstream os;
    os << "E[H_T]/T = " << num(s.mean) << " +- " << num(s.stderr_) << ", sigma2 = " << num(sig.sigma2) << " +- "
       << num(sig.stderr_) << " (target 2)";
    return {mean_ok && sig_ok, os.str()};
}

Outcome c3_resolvent() {
    const auto res = build_resolvent(Kernel::exponential(0.5, 1.0), 1.0, 1.0, 1e-3, 1e-9);
    double err = 0.0;
    for (std::size_t k = 0; k < res.values.size(); ++k) {
        const double t = double(k) * res.step;
        err = std::max(err, std::abs(res.values[k] - 0.5 * std::exp(-0.5 * t)));
    }
    return {err < 1e-6, "sup grid error " + num(err) + " over [0, " + num(res.horizon()) + "]"};
}

Outcome c4_malliavin() {
    auto cfg = config("linear.cfg");
    cfg.malliavin_replicas = 5000;
    cfg.malliavin_pairs = 100;
    cfg.malliavin_offsets.clear();
    const auto rep = run_malliavin(cfg);
    std::size_t ok = 0;
    for (const auto& r : rep.rows) ok += r.satisfied ? 1 : 0;
    std::ostringstream os;
    os << ok << "/" << rep.rows.size() << " grid points within bound, theta pairs " << rep.pairs_identical << "/"
       << rep.pairs_checked << " identical";
    return {rep.rows.size() == 20 && rep.all_bounds_satisfied && rep.pairs_checked == 100 &&
                rep.pairs_identical == rep.pairs_checked,
            os.str()};
}

Outcome c5_martingale_and_rescaling() {
    bool pass = true;
    std::ostringstream os;
    for (const char* name : {"linear.cfg", "sigmoid.cfg"}) {
        const auto cfg = config(name);
        const Model& m = cfg.model;
        const double horizon = 400.0;
        const std::size_t n = power_rule_n(horizon);
        const std::size_t reps = 2000;
        const double step = cfg.quad_step > 0.0 ? cfg.quad_step : default_quad_step(horizon);
        std::vector<std::vector<double>> levels(reps);
        std::vector<std::vector<double>> gaps(reps);
        parallel_for(reps, [&](std::size_t r) {
            const auto path = simulate_path(m, horizon, PoissonField::for_replica(cfg.master_seed + 17, r,
                                                                                  m.marks.distribution()));
            levels[r] = rescale(m, path, horizon, n, step).values;
            const auto trace = compensator_trace(m, path, std::vector<double>{horizon}, step);
            double prev = 0.0;
            for (double v : trace.at_events) {
                gaps[r].push_back(v - prev);
                prev = v;
            }
        });
        double worst_z = 0.0;
        for (std::size_t i = 1; i <= n; ++i) {
            std::vector<double> col(reps);
            for (std::size_t r = 0; r < reps; ++r) col[r] = levels[r][i];
            const auto s = summarize(col);
            const double z = std::abs(s.mean) / s.stderr_;
            worst_z = std::max(worst_z, z);
        }
        std::vector<double> pooled;
        for (const auto& g : gaps) pooled.insert(pooled.end(), g.begin(), g.end());
        const auto ks = ks_test(pooled, [](double x) { return x <= 0.0 ? 0.0 : 1.0 - std::exp(-x); });
        pass = pass && worst_z <= 4.0 && ks.p_value > 1e-3;
        os << name << ": max |mean|/stderr " << num(worst_z) << ", KS p " << num(ks.p_value) << " (" << ks.count
           << " gaps)  ";
    }
    return {pass, os.str()};
}

Outcome c6_discretization() {
    const auto rep = run_discretization(config("poisson.cfg"));
    std::ostringstream os;
    os << "T = " << num(rep.horizon) << " gaps";
    for (const auto& r : rep.rows) os << ' ' << num(r.error.mean_sup_gap);
    os << ", slope " << num(rep.slope);
    return {rep.horizon == 400.0 && rep.rows.size() == 4 && rep.non_increasing && rep.slope >= -0.6 &&
                rep.slope <= -0.15,
            os.str()};
}

Outcome c7_functional() {
    const auto cfg = config("sigmoid.cfg");
    const auto rep = run_functional_convergence(cfg);
    bool decreasing = true;
    double lo = INFINITY, hi = 0.0;
    std::ostringstream os;
    os << "lower bounds";
    for (std::size_t k = 0; k < rep.rows.size(); ++k) {
        const auto& r = rep.rows[k];
        if (r.n != power_rule_n(r.horizon)) decreasing = false;
        if (k > 0 && !(r.functional_lb < rep.rows[k - 1].functional_lb)) decreasing = false;
        lo = std::min(lo, r.functional_ratio);
        hi = std::max(hi, r.functional_ratio);
        os << ' ' << num(r.functional_lb) << " (+-" << num(r.functional_stderr) << ")";
    }
    const double spread = hi / lo;
    os << ", ratio max/min " << num(spread);
    const bool grid = rep.rows.size() == 3 && rep.rows[0].horizon == 100.0 && rep.rows[2].horizon == 1600.0;
    return {grid && decreasing && lo > 0.0 && spread < 5.0 && cfg.model.h.kind == NonlinearityKind::Sigmoid,
            os.str()};
}

Outcome c8_lemmas() {
    auto zero = parse_config(
        "model.mu = 1\nkernel.family = zero\nnonlinearity.family = linear\n"
        "lemmas.T_grid = 16, 64, 256\nlemmas.n_grid = 4, 8, 16\nlemmas.replicas = 200\n");
    const auto z = run_lemma_checks(zero);
    bool exact = z.rows.size() == 9;
    for (const auto& r : z.rows) {
        exact = exact && r.lhs_mass == 1.0 / double(r.n) && r.lhs_dev == 0.0;
    }
    const auto lin = run_lemma_checks(config("linear.cfg"));
    bool bounded = lin.rows.size() == 9;
    for (const auto& r : lin.rows) {
        bounded = bounded && std::isfinite(r.ratio_mass) && std::isfinite(r.ratio_dev) && r.ratio_mass > 0.0 &&
                  r.ratio_dev > 0.0;
    }
    bounded = bounded && lin.spread_mass < 2.0 && lin.spread_dev < 2.0;
    std::ostringstream os;
    os << "zero kernel " << (exact ? "exact" : "mismatch") << ", linear ratio spreads " << num(lin.spread_mass)
       << " and " << num(lin.spread_dev) << " (C = " << num(lin.fitted_c_mass) << ", " << num(lin.fitted_c_dev) << ")";
    return {exact && bounded, os.str()};
}

Outcome c9_w1_oracle() {
    std::mt19937_64 rng(2024);
    std::size_t exact = 0;
    const std::size_t instances = 200;
    for (std::size_t i = 0; i < instances; ++i) {
        const std::size_t k = 1 + rng() % 7;
        std::vector<double> a(k), b(k);
        for (auto& v : a) v = double(std::int64_t(rng() % 41) - 20);
        for (auto& v : b) v = double(std::int64_t(rng() % 41) - 20);
        std::vector<std::size_t> perm(k);
        std::iota(perm.begin(), perm.end(), 0);
        double best = INFINITY;
        do {
            double cost = 0.0;
            for (std::size_t j = 0; j < k; ++j) cost += std::abs(a[j] - b[perm[j]]);
            best = std::min(best, cost);
        } while (std::next_permutation(perm.begin(), perm.end()));
        if (w1_empirical_1d(a, b) == best / double(k)) ++exact;
    }
    return {exact == instances, std::to_string(exact) + "/" + std::to_string(instances) + " instances exact"};
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::stringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

Outcome c10_determinism() {
    const std::vector<std::string> commands = {"constants",           "simulate", "sigma2",  "converge-marginal",
                                               "converge-functional", "lemmas",   "malliavin", "discretize-error"};
    const fs::path root = fs::temp_directory_path() / "hawkes_acceptance_determinism";
    fs::remove_all(root);
    std::size_t compared = 0;
    std::string bad;
    for (const auto& cmd : commands) {
        std::string outputs[2];
        std::vector<std::string> names;
        for (int run = 0; run < 2; ++run) {
            const fs::path dir = root / (cmd + "_" + std::to_string(run));
            const std::string line = std::string(HAWKES_CLI_PATH) + " --config " + HAWKES_CONFIG_DIR +
                                     "/quick.cfg --seed 42 --out " + dir.string() + " " + cmd + " > " +
                                     (root / (cmd + ".log")).string() + " 2>&1";
            fs::create_directories(root);
            if (std::system(line.c_str()) != 0) {
                bad += cmd + "(exit) ";
                break;
            }
            std::vector<fs::path> files;
            for (const auto& e : fs::directory_iterator(dir))
                if (e.path().extension() == ".csv") files.push_back(e.path());
            std::sort(files.begin(), files.end());
            for (const auto& f : files) {
                outputs[run] += f.filename().string() + '\n' + slurp(f);
                if (run == 0) names.push_back(f.filename().string());
            }
        }
        if (names.empty()) bad += cmd + "(no csv) ";
        if (outputs[0] != outputs[1]) bad += cmd + " ";
        compared += names.size();
    }
    fs::remove_all(root);
    return {bad.empty(), std::to_string(commands.size()) + " subcommands, " + std::to_string(compared) +
                             " CSV files byte-identical" + (bad.empty() ? "" : "; differing: " + bad)};
}

}  // namespace

int main() {
    const std::vector<Criterion> criteria = {
        {1, "Poisson control", 120.0, c1_poisson_control},
        {2, "linear mean intensity", 120.0, c2_linear_mean_intensity},
        {3, "resolvent accuracy", 5.0, c3_resolvent},
        {4, "derivative bound", 180.0, c4_malliavin},
        {5, "martingale and time rescaling", 120.0, c5_martingale_and_rescaling},
        {6, "discretization trend", 180.0, c6_discretization},
        {7, "functional convergence", 600.0, c7_functional},
        {8, "moment-bound shapes", 300.0, c8_lemmas},
        {9, "1-D W1 oracle", 5.0, c9_w1_oracle},
        {10, "determinism", 600.0, c10_determinism},
    };
    int failures = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome out;
        try {
            out = c.run();
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = secs < c.budget_s;
        const bool pass = out.pass && in_time;
        failures += pass ? 0 : 1;
        std::printf("C%-2d %s  %s: %s [%.1f s of %.0f s%s]\n", c.id, pass ? "PASS" : "FAIL", c.name,
                    out.detail.c_str(), secs, c.budget_s, in_time ? "" : ", over budget");
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
