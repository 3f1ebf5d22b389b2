#include <algorithm>
#include <cmath>

#include "hawkes/error.hpp"
#include "hawkes/parallel.hpp"
#include "hawkes/simulator.hpp"

namespace hawkes {

namespace {

bool closed_form_applies(const Model& model, CompensatorMethod method) {
    return method == CompensatorMethod::Auto && model.h.kind == NonlinearityKind::Linear &&
           std::holds_alternative<ExponentialFamily>(model.kernel.family());
}

// Integrates lambda over [lo, hi] given the events before lo already in `ex`.
class SegmentIntegrator {
public:
    SegmentIntegrator(const Model& model, double quad_step, bool closed)
        : model_(model), step_(quad_step), closed_(closed) {
        if (closed_) beta_ = std::get<ExponentialFamily>(model.kernel.family()).beta;
    }

    double operator()(const Excitation& ex, double lo, double hi) const {
        const double width = hi - lo;
        if (!(width > 0.0)) return 0.0;
        if (closed_) {
            const double xi = ex.xi(lo);
            return model_.mu * width + (xi == 0.0 ? 0.0 : xi * -std::expm1(-beta_ * width) / beta_);
        }
        auto lambda = [&](double s) { return model_.h(model_.mu + ex.xi(s)); };
        std::size_t m = std::size_t(std::ceil(width / step_));
        m = std::max<std::size_t>(2, m + (m & 1));
        const double h = width / double(m);
        double odd = 0.0;
        double even = 0.0;
        for (std::size_t k = 1; k < m; ++k) {
            const double v = lambda(lo + double(k) * h);
            if (k & 1) odd += v;
            else even += v;
        }
        return h / 3.0 * (lambda(lo) + 4.0 * odd + 2.0 * even + lambda(hi));
    }

private:
    const Model& model_;
    double step_;
    bool closed_;
    double beta_ = 0.0;
};

}  // namespace

double default_quad_step(double horizon) { return std::min(horizon * 1e-5, 1e-2); }

CompensatorTrace compensator_trace(const Model& model, const PathRecord& path, std::span<const double> queries,
                                   double quad_step, CompensatorMethod method) {
    if (!(quad_step > 0.0)) throw DomainError("quadrature step must be positive");
    for (std::size_t j = 0; j < queries.size(); ++j) {
        if (queries[j] < 0.0 || queries[j] > path.horizon) throw DomainError("compensator query outside [0, T]");
        if (j > 0 && queries[j] < queries[j - 1]) throw DomainError("compensator queries must be nondecreasing");
    }

    const SegmentIntegrator integrate(model, quad_step, closed_form_applies(model, method));
    const MarkFunction& b = model.marks.b();
    Excitation ex(model.kernel);

    CompensatorTrace out;
    out.at_events.reserve(path.events.size());
    out.at_queries.reserve(queries.size());

    double t = 0.0;
    double acc = 0.0;
    std::size_t q = 0;
    const bool bounded = !queries.empty();
    for (const auto& e : path.events) {
        if (bounded && e.t > queries.back()) break;
        while (q < queries.size() && queries[q] <= e.t) {
            acc += integrate(ex, t, queries[q]);
            t = queries[q];
            out.at_queries.push_back(acc);
            ++q;
        }
        acc += integrate(ex, t, e.t);
        t = e.t;
        out.at_events.push_back(acc);
        ex.add(e.t, b(e.mark));
    }
    for (; q < queries.size(); ++q) {
        acc += integrate(ex, t, queries[q]);
        t = queries[q];
        out.at_queries.push_back(acc);
    }
    return out;
}

double compensator(const Model& model, const PathRecord& path, double t, double quad_step,
                   CompensatorMethod method) {
    const double q[1] = {t};
    return compensator_trace(model, path, q, quad_step, method).at_queries.front();
}

void attach_compensator_checkpoints(const Model& model, PathRecord& path, std::span<const double> grid,
                                    double quad_step) {
    path.checkpoint_times.assign(grid.begin(), grid.end());
    path.compensator_checkpoints = compensator_trace(model, path, grid, quad_step).at_queries;
}

double default_burn_in(const Kernel& kernel) {
    if (kernel.is_zero()) return 0.0;
    return 50.0 * kernel.first_moment() / kernel.l1_norm();
}

Sigma2Estimate stationary_sigma2(const Model& model, double burn_in, double horizon, std::size_t replicas,
                                 std::uint64_t master_seed, const FieldGeometry& geometry, double quad_step,
                                 double stderr_tol) {
    model.validate();
    if (!(burn_in >= 0.0 && horizon > burn_in)) throw DomainError("sigma2 needs 0 <= burn_in < horizon");
    if (replicas < 2) throw DomainError("sigma2 needs at least two replicas");
    const double step = quad_step > 0.0 ? quad_step : default_quad_step(horizon);

    std::vector<double> averages(replicas);
    parallel_for(replicas, [&](std::size_t r) {
        const auto field = PoissonField::for_replica(master_seed, r, model.marks.distribution(), geometry);
        SimulationOptions opts;
        opts.record_candidates = false;
        const PathRecord path = simulate_path(model, horizon, field, opts);
        const double q[2] = {burn_in, horizon};
        const auto trace = compensator_trace(model, path, q, step);
        averages[r] = (trace.at_queries[1] - trace.at_queries[0]) / (horizon - burn_in);
    });

    Sigma2Estimate out;
    double mean = 0.0;
    for (double a : averages) mean += a;
    mean /= double(replicas);
    double ss = 0.0;
    for (double a : averages) ss += (a - mean) * (a - mean);
    out.sigma2 = mean;
    out.stderr_ = std::sqrt(ss / double(replicas - 1) / double(replicas));

    if (model.kernel.is_zero()) {
        out.closed_form = model.h_mu();
    } else if (model.h.kind == NonlinearityKind::Linear && model.kernel.is_nonnegative() &&
               model.marks.b_nonnegative()) {
        // E lambda = mu + m_b1 ||phi||_1 E lambda.
        out.closed_form = model.mu / (1.0 - model.rho());
    }
    out.precision_warning = stderr_tol > 0.0 && out.stderr_ > stderr_tol;
    return out;
}

}  // namespace hawkes
