#include "hawkes/harness/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hawkes/error.hpp"
#include "hawkes/parallel.hpp"
#include "hawkes/rescaler.hpp"
#include "hawkes/stats.hpp"
#include "hawkes/wasserstein.hpp"

namespace hawkes::harness {

namespace {

constexpr std::uint64_t kReferenceTag = 0x726566ULL;
constexpr std::uint64_t kControlTag = 0x63746c;
constexpr std::uint64_t kThetaTag = 0x7468657461ULL;
constexpr std::uint64_t kSigmaTag = 0x7369676d61ULL;
constexpr std::size_t kJackknifeGroups = 20;

double step_for(const ExperimentConfig& cfg, double horizon) {
    return cfg.quad_step > 0.0 ? cfg.quad_step : default_quad_step(horizon);
}

PathRecord replica_path(const ExperimentConfig& cfg, std::size_t r, double horizon) {
    const auto field = PoissonField::for_replica(cfg.master_seed, r, cfg.model.marks.distribution(), cfg.geometry);
    SimulationOptions opts;
    opts.record_candidates = false;
    return simulate_path(cfg.model, horizon, field, opts);
}

double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (!(y[i] > 0.0)) return std::numeric_limits<double>::quiet_NaN();
        lx.push_back(std::log(x[i]));
        ly.push_back(std::log(y[i]));
    }
    if (lx.size() < 2) return std::numeric_limits<double>::quiet_NaN();
    return fit_line(lx, ly).slope;
}

double jackknife_w1(const std::vector<double>& samples, double var) {
    const std::size_t groups = std::min(kJackknifeGroups, samples.size());
    std::vector<double> theta(groups);
    std::vector<double> kept;
    for (std::size_t g = 0; g < groups; ++g) {
        kept.clear();
        for (std::size_t i = 0; i < samples.size(); ++i)
            if (i % groups != g) kept.push_back(samples[i]);
        theta[g] = w1_vs_gaussian_1d(kept, 0.0, var);
    }
    const Summary s = summarize(theta);
    return std::sqrt(double(groups - 1) * double(groups - 1) / double(groups) * s.variance);
}

std::vector<std::vector<double>> reference_levels(const GaussianReference& ref, std::size_t count,
                                                  std::uint64_t seed) {
    std::vector<std::vector<double>> out(count);
    parallel_for(count, [&](std::size_t i) { out[i] = ref.sample_levels(seed, i); });
    return out;
}

ConvergenceReport run_convergence(const ExperimentConfig& cfg, bool functional) {
    cfg.validate();
    ConvergenceReport report;
    report.functional = functional;
    report.sigma2 = resolve_sigma2(cfg);
    report.sigma_tilde2 = report.sigma2.sigma2 * cfg.model.marks.m_g2();
    if (!(report.sigma_tilde2 > 0.0)) throw ValidationError("sigma_tilde^2 must be positive");

    const std::size_t cells = cfg.t_grid.size();
    const std::size_t reps = cfg.replicas;
    const double t_max = cfg.t_grid.back();
    std::vector<std::vector<double>> terminal(cells, std::vector<double>(reps));
    std::vector<std::vector<std::vector<double>>> levels(cells);
    if (functional)
        for (auto& c : levels) c.resize(reps);

    parallel_for(reps, [&](std::size_t r) {
        const PathRecord path = replica_path(cfg, r, t_max);
        for (std::size_t k = 0; k < cells; ++k) {
            const double T = cfg.t_grid[k];
            RescaledPath rp = rescale(cfg.model, path, T, cfg.n_for(T), step_for(cfg, T));
            terminal[k][r] = rp.values.back();
            if (functional) levels[k][r] = std::move(rp.values);
        }
    });

    // Control cell: Gaussian reference samples against their own law.
    {
        const GaussianReference one{report.sigma_tilde2, 1};
        std::vector<double> ctl(reps);
        for (std::size_t i = 0; i < reps; ++i) {
            ctl[i] = one.sample_increments(mix_key({cfg.master_seed, kControlTag}), i)[0];
        }
        report.control_value = w1_vs_gaussian_1d(ctl, 0.0, report.sigma_tilde2);
        report.control_threshold = 5.0 * std::sqrt(report.sigma_tilde2 / double(reps));
        if (functional) {
            const std::size_t n0 = cfg.n_for(cfg.t_grid.front());
            const GaussianReference ref{report.sigma_tilde2, n0};
            const auto a = reference_levels(ref, cfg.reference_count(), mix_key({cfg.master_seed, kControlTag, 1}));
            const auto b = reference_levels(ref, cfg.reference_count(), mix_key({cfg.master_seed, kControlTag, 2}));
            const auto fam = default_functional_family();
            const FunctionalBound fb = functional_w1_lower_bound(a, b, fam);
            for (const auto& v : fb.per_functional) {
                if (v.difference > 4.0 * v.stderr_) {
                    std::ostringstream os;
                    os << "functional control failed: reference vs reference " << functional_name(v.functional)
                       << " differs by " << v.difference << " > 4 * " << v.stderr_;
                    throw ControlFailure(os.str());
                }
            }
        }
        if (report.control_value > report.control_threshold) {
            std::ostringstream os;
            os << "marginal control failed: Gaussian reference W1 " << report.control_value << " > "
               << report.control_threshold;
            throw ControlFailure(os.str());
        }
    }

    const auto family = default_functional_family();
    for (std::size_t k = 0; k < cells; ++k) {
        ConvergenceRow row;
        row.horizon = cfg.t_grid[k];
        row.n = cfg.n_for(row.horizon);
        row.marginal_w1 = w1_vs_gaussian_1d(terminal[k], 0.0, report.sigma_tilde2);
        row.marginal_stderr = jackknife_w1(terminal[k], report.sigma_tilde2);
        row.marginal_ratio = row.marginal_w1 / rate_envelope(row.horizon);
        if (functional) {
            const GaussianReference ref{report.sigma_tilde2, row.n};
            const std::uint64_t seed = mix_key({cfg.master_seed, kReferenceTag});
            const auto b = reference_levels(ref, cfg.reference_count(), seed);
            const FunctionalBound fb = functional_w1_lower_bound(levels[k], b, family);
            row.functional_lb = fb.value;
            row.functional_stderr = fb.stderr_;
            row.functional_ratio = fb.value / rate_envelope(row.horizon);
            row.functional_detail = fb;

            std::vector<IncrementVector> inc(reps);
            for (std::size_t r = 0; r < reps; ++r) {
                RescaledPath rp;
                rp.n = row.n;
                rp.values = levels[k][r];
                inc[r] = increments(rp);
            }
            const FunctionalBound ib =
                increment_vector_w1_lower_bound(inc, ref, cfg.reference_count(), seed, family);
            row.increment_lb = ib.value;
            row.increment_stderr = ib.stderr_;
        }
        report.rows.push_back(row);
    }

    std::vector<double> ts;
    std::vector<double> mw;
    std::vector<double> fl;
    for (const auto& row : report.rows) {
        ts.push_back(row.horizon);
        mw.push_back(row.marginal_w1);
        fl.push_back(row.functional_lb);
        report.fitted_c = std::max(report.fitted_c, row.marginal_ratio);
    }
    report.marginal_slope = log_slope(ts, mw);
    if (functional) {
        report.functional_slope = log_slope(ts, fl);
        for (const auto& row : report.rows) {
            if (row.functional_lb > report.fitted_c * rate_envelope(row.horizon)) report.below_envelope = false;
        }
    }
    return report;
}

}  // namespace

double rate_envelope(double horizon) { return std::log(horizon) / std::pow(horizon, 0.1); }

Sigma2Source resolve_sigma2(const ExperimentConfig& cfg) {
    const Model& m = cfg.model;
    Sigma2Source out;
    if (m.kernel.is_zero()) {
        out.sigma2 = m.h_mu();
        out.closed_form = true;
        return out;
    }
    if (m.h.kind == NonlinearityKind::Linear && m.kernel.is_nonnegative() && m.marks.b_nonnegative()) {
        out.sigma2 = m.mu / (1.0 - m.rho());
        out.closed_form = true;
        return out;
    }
    const double burn = cfg.sigma2_burn_in >= 0.0 ? cfg.sigma2_burn_in : default_burn_in(m.kernel);
    const Sigma2Estimate est =
        stationary_sigma2(m, burn, cfg.sigma2_horizon, cfg.sigma2_replicas, mix_key({cfg.master_seed, kSigmaTag}),
                          cfg.geometry, cfg.quad_step, cfg.sigma2_stderr_tol);
    if (est.precision_warning) {
        std::ostringstream os;
        os << "sigma2 estimate " << est.sigma2 << " has standard error " << est.stderr_ << " above tolerance "
           << cfg.sigma2_stderr_tol << " (burn-in " << burn << ", horizon " << cfg.sigma2_horizon << ", replicas "
           << cfg.sigma2_replicas << ")";
        throw ValidationError(os.str());
    }
    out.sigma2 = est.sigma2;
    out.stderr_ = est.stderr_;
    return out;
}

ConvergenceReport run_marginal_convergence(const ExperimentConfig& cfg) { return run_convergence(cfg, false); }

ConvergenceReport run_functional_convergence(const ExperimentConfig& cfg) { return run_convergence(cfg, true); }

LemmaReport run_lemma_checks(const ExperimentConfig& cfg) {
    cfg.validate();
    LemmaReport report;
    report.sigma2 = resolve_sigma2(cfg);
    const double sigma2 = report.sigma2.sigma2;

    struct Cell {
        double horizon;
        std::size_t n;
    };
    std::vector<Cell> cells;
    for (double T : cfg.lemmas_t_grid)
        for (std::size_t n : cfg.lemmas_n_grid) cells.push_back({T, n});

    const std::size_t reps = cfg.lemmas_replicas;
    if (reps < 2) throw ValidationError("lemmas.replicas must be >= 2");
    std::vector<std::vector<double>> v43(cells.size(), std::vector<double>(reps));
    std::vector<std::vector<double>> v44(cells.size(), std::vector<double>(reps));
    const double t_max = cfg.lemmas_t_grid.back();

    parallel_for(reps, [&](std::size_t r) {
        const PathRecord path = replica_path(cfg, r, t_max);
        for (std::size_t c = 0; c < cells.size(); ++c) {
            const double T = cells[c].horizon;
            const std::size_t n = cells[c].n;
            std::vector<double> q(n + 1);
            for (std::size_t i = 0; i <= n; ++i) q[i] = T * (double(i) / double(n));
            q[n] = T;
            const auto trace = compensator_trace(cfg.model, path, q, step_for(cfg, T));
            double s43 = 0.0;
            double s44 = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                const double integral = trace.at_queries[i + 1] - trace.at_queries[i];
                s43 += integral * integral;
                s44 += std::fabs(sigma2 / double(n) - integral / T);
            }
            v43[c][r] = s43 / (T * T);
            v44[c][r] = s44;
        }
    });

    double min43 = std::numeric_limits<double>::infinity();
    double min44 = std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < cells.size(); ++c) {
        LemmaRow row;
        row.horizon = cells[c].horizon;
        row.n = cells[c].n;
        const Summary s43 = summarize(v43[c]);
        const Summary s44 = summarize(v44[c]);
        row.lhs_mass = s43.mean;
        row.stderr_mass = s43.stderr_;
        row.shape_mass = 1.0 / row.horizon + 1.0 / double(row.n);
        row.ratio_mass = row.lhs_mass / row.shape_mass;
        row.lhs_dev = s44.mean;
        row.stderr_dev = s44.stderr_;
        row.shape_dev = 1.0 / row.horizon + std::sqrt(double(row.n) / row.horizon);
        row.ratio_dev = row.lhs_dev / row.shape_dev;
        report.fitted_c_mass = std::max(report.fitted_c_mass, row.ratio_mass);
        report.fitted_c_dev = std::max(report.fitted_c_dev, row.ratio_dev);
        min43 = std::min(min43, row.ratio_mass);
        min44 = std::min(min44, row.ratio_dev);
        report.rows.push_back(row);
    }
    report.spread_mass = min43 > 0.0 ? report.fitted_c_mass / min43 : 0.0;
    report.spread_dev = min44 > 0.0 ? report.fitted_c_dev / min44 : 0.0;
    return report;
}

DiscretizeReport run_discretization(const ExperimentConfig& cfg) {
    cfg.validate();
    DiscretizeReport report;
    report.horizon = cfg.discretize_t;
    std::vector<PathRecord> paths(cfg.discretize_replicas);
    parallel_for(paths.size(), [&](std::size_t r) { paths[r] = replica_path(cfg, r, cfg.discretize_t); });

    std::vector<double> ns;
    std::vector<double> gaps;
    for (std::size_t n : cfg.discretize_n_grid) {
        DiscretizeRow row;
        row.n = n;
        row.error = discretization_error(cfg.model, paths, cfg.discretize_t, n, cfg.discretize_audit_spacing,
                                         step_for(cfg, cfg.discretize_t));
        if (!report.rows.empty() && row.error.mean_sup_gap > report.rows.back().error.mean_sup_gap) {
            report.non_increasing = false;
        }
        ns.push_back(double(n));
        gaps.push_back(row.error.mean_sup_gap);
        report.rows.push_back(row);
    }
    report.slope = log_slope(ns, gaps);
    return report;
}

MalliavinReport run_malliavin(const ExperimentConfig& cfg) {
    cfg.validate();
    MalliavinReport report;
    DerivativeBoundConfig dc;
    dc.u = cfg.malliavin_u;
    dc.x = cfg.malliavin_x;
    dc.offsets = cfg.malliavin_offsets;
    if (dc.offsets.empty())
        for (int k = 1; k <= 20; ++k) dc.offsets.push_back(0.5 * k);
    dc.replicas = cfg.malliavin_replicas;
    dc.master_seed = cfg.master_seed;
    dc.geometry = cfg.geometry;
    report.rows = derivative_bound_check(cfg.model, dc);
    for (const auto& row : report.rows) report.all_bounds_satisfied = report.all_bounds_satisfied && row.satisfied;

    const double horizon = dc.u + *std::max_element(dc.offsets.begin(), dc.offsets.end());
    std::vector<char> same(cfg.malliavin_pairs, 0);
    parallel_for(cfg.malliavin_pairs, [&](std::size_t k) {
        const std::uint64_t key = mix_key({cfg.master_seed, k, kThetaTag});
        const PoissonField field(key, cfg.model.marks.distribution(), cfg.geometry);
        const PathRecord path = simulate_path(cfg.model, horizon, field);
        Xoshiro256 rng(key);
        const double u = horizon * (0.5 * rng.uniform() + 0.25);
        const double lambda_u = intensity_at(cfg.model, path.events, u);
        const double rho1 = lambda_u * rng.uniform();
        const double rho2 = lambda_u * rng.uniform();
        const double x = sample_mark(cfg.model.marks.distribution(), rng);
        same[k] = theta_irrelevance_check(cfg.model, path, u, rho1, rho2, x, field) ? 1 : 0;
    });
    report.pairs_checked = same.size();
    report.pairs_identical = std::size_t(std::count(same.begin(), same.end(), 1));
    return report;
}

}  // namespace hawkes::harness
