#include "hawkes/rescaler.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hawkes/error.hpp"
#include "hawkes/parallel.hpp"

namespace hawkes {

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Everything needed to evaluate F at arbitrary times of one path.
struct PathView {
    const Model& model;
    const PathRecord& path;
    double horizon;
    double scale;                  // 1 / sqrt(T)
    std::size_t count;             // events in (0, T]
    std::vector<double> g_prefix;  // g_prefix[k] = sum of g over the first k events

    PathView(const Model& m, const PathRecord& p, double T) : model(m), path(p), horizon(T), scale(1.0 / std::sqrt(T)) {
        count = p.count_at(T);
        g_prefix.resize(count + 1, 0.0);
        const MarkFunction& g = m.marks.g();
        for (std::size_t k = 0; k < count; ++k) g_prefix[k + 1] = g_prefix[k] + g(p.events[k].mark);
    }

    // Number of events with tau <= s (inclusive) or tau < s.
    std::size_t events_upto(double s, bool inclusive) const {
        auto first = path.events.begin();
        auto last = path.events.begin() + std::ptrdiff_t(count);
        auto it = inclusive ? std::upper_bound(first, last, s, [](double v, const Event& e) { return v < e.t; })
                            : std::lower_bound(first, last, s, [](const Event& e, double v) { return e.t < v; });
        return std::size_t(it - first);
    }

    double f(double claims, double lambda_int) const {
        return (claims - model.marks.m_g1() * lambda_int) * scale;
    }
};

void check_args(const PathRecord& path, double horizon, std::size_t n) {
    if (n == 0) throw DomainError("subdivision size n must be positive");
    if (!(horizon > 0.0) || horizon > path.horizon) throw DomainError("rescaling horizon outside (0, path horizon]");
}

std::vector<double> grid_times(double horizon, std::size_t n) {
    std::vector<double> q(n + 1);
    for (std::size_t i = 0; i <= n; ++i) q[i] = horizon * (double(i) / double(n));
    q[n] = horizon;
    return q;
}

double resolve_step(double quad_step, double horizon) {
    return quad_step > 0.0 ? quad_step : default_quad_step(horizon);
}

}  // namespace

double quantize(double v) { return std::nearbyint(v / kRescaleQuantum) * kRescaleQuantum; }

RescaledPath rescale(const Model& model, const PathRecord& path, double horizon, std::size_t n, double quad_step) {
    check_args(path, horizon, n);
    const PathView view(model, path, horizon);
    const auto q = grid_times(horizon, n);
    const auto trace = compensator_trace(model, path, q, resolve_step(quad_step, horizon));

    RescaledPath out;
    out.horizon = horizon;
    out.n = n;
    out.values.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) {
        out.values[i] = quantize(view.f(view.g_prefix[view.events_upto(q[i], true)], trace.at_queries[i]));
    }
    out.values[0] = 0.0;

    double sup = std::fabs(view.f(view.g_prefix[view.count], trace.at_queries[n]));
    for (std::size_t k = 0; k < view.count; ++k) {
        sup = std::max(sup, std::fabs(view.f(view.g_prefix[k], trace.at_events[k])));
        sup = std::max(sup, std::fabs(view.f(view.g_prefix[k + 1], trace.at_events[k])));
    }
    out.sup_norm_estimate = sup;
    return out;
}

IncrementVector increments(const RescaledPath& path) {
    IncrementVector out;
    out.deltas.resize(path.n);
    for (std::size_t i = 0; i < path.n; ++i) out.deltas[i] = path.values[i + 1] - path.values[i];
    return out;
}

std::vector<double> chi_levels(std::span<const double> deltas) {
    std::vector<double> out(deltas.size() + 1, 0.0);
    for (std::size_t i = 0; i < deltas.size(); ++i) out[i + 1] = out[i] + deltas[i];
    return out;
}

std::size_t subdivision_index(double t, std::size_t n) {
    if (n == 0) throw DomainError("subdivision size n must be positive");
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("time outside [0, 1]");
    if (t >= 1.0) return n;
    auto i = std::min(n - 1, std::size_t(t * double(n)));
    while (i > 0 && double(i) / double(n) > t) --i;
    while (i + 1 < n && double(i + 1) / double(n) <= t) ++i;
    return i;
}

double StepPath::operator()(double t) const { return levels[subdivision_index(t, n())]; }

StepPath pi_n(const std::function<double(double)>& x, std::size_t n) {
    if (n == 0) throw DomainError("subdivision size n must be positive");
    StepPath out;
    out.levels.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) out.levels[i] = x(double(i) / double(n));
    return out;
}

double norm_inf1(std::span<const double> x) {
    if (x.empty()) throw DomainError("norm_inf1 of an empty vector");
    double partial = 0.0;
    double best = 0.0;
    for (double v : x) {
        partial += v;
        best = std::max(best, std::fabs(partial));
    }
    return best;
}

SupGap sup_gap(const Model& model, const PathRecord& path, double horizon, std::size_t n, double quad_step) {
    check_args(path, horizon, n);
    const PathView view(model, path, horizon);
    const auto q = grid_times(horizon, n);
    const auto trace = compensator_trace(model, path, q, resolve_step(quad_step, horizon));

    SupGap out;
    auto consider = [&](double gap, double t, bool at_event) {
        if (gap > out.value) {
            out.value = gap;
            out.argmax = t;
            out.at_event = at_event;
        }
    };
    std::size_t k = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t at_lo = view.events_upto(q[i], true);
        const double base = view.f(view.g_prefix[at_lo], trace.at_queries[i]);
        k = at_lo;
        while (k < view.count && path.events[k].t < q[i + 1]) {
            const double t = path.events[k].t / horizon;
            consider(std::fabs(view.f(view.g_prefix[k], trace.at_events[k]) - base), t, true);
            consider(std::fabs(view.f(view.g_prefix[k + 1], trace.at_events[k]) - base), t, true);
            ++k;
        }
        // Left limit at t_{i+1}.
        consider(std::fabs(view.f(view.g_prefix[k], trace.at_queries[i + 1]) - base), double(i + 1) / double(n),
                 false);
    }
    return out;
}

double audit_sup_gap(const Model& model, const PathRecord& path, double horizon, std::size_t n, double spacing,
                     double quad_step) {
    check_args(path, horizon, n);
    if (!(spacing > 0.0) || spacing > 1.0 / (10.0 * double(n))) {
        throw ValidationError("audit grid spacing must be in (0, 1/(10 n)]");
    }
    const PathView view(model, path, horizon);
    const double step = resolve_step(quad_step, horizon);
    const auto q = grid_times(horizon, n);
    const auto grid_trace = compensator_trace(model, path, q, step);

    std::vector<double> audit;
    for (std::size_t k = 0;; ++k) {
        const double t = double(k) * spacing;
        if (t > 1.0) break;
        audit.push_back(std::min(horizon, t * horizon));
    }
    const auto audit_trace = compensator_trace(model, path, audit, step);

    double best = 0.0;
    for (std::size_t j = 0; j < audit.size(); ++j) {
        const double t = std::min(1.0, double(j) * spacing);
        const std::size_t i = subdivision_index(t, n);
        const double base = view.f(view.g_prefix[view.events_upto(q[i], true)], grid_trace.at_queries[i]);
        const double value = view.f(view.g_prefix[view.events_upto(audit[j], true)], audit_trace.at_queries[j]);
        best = std::max(best, std::fabs(value - base));
    }
    return best;
}

DiscretizationError discretization_error(const Model& model, std::span<const PathRecord> paths, double horizon,
                                         std::size_t n, double audit_spacing, double quad_step) {
    if (paths.size() < 100) throw DomainError("discretization error needs at least 100 replicas");
    if (n == 0) throw DomainError("subdivision size n must be positive");
    const double spacing = audit_spacing > 0.0 ? audit_spacing : 1.0 / (10.0 * double(n));
    if (spacing > 1.0 / (10.0 * double(n))) throw ValidationError("audit grid spacing must be <= 1/(10 n)");

    std::vector<double> gaps(paths.size());
    std::vector<double> excess(paths.size());
    parallel_for(paths.size(), [&](std::size_t r) {
        gaps[r] = sup_gap(model, paths[r], horizon, n, quad_step).value;
        excess[r] = audit_sup_gap(model, paths[r], horizon, n, spacing, quad_step) - gaps[r];
    });

    DiscretizationError out;
    const double count = double(paths.size());
    double sum = 0.0;
    double sum4 = 0.0;
    for (double g : gaps) {
        sum += g;
        sum4 += g * g * g * g;
    }
    out.mean_sup_gap = sum / count;
    out.fourth_moment = sum4 / count;
    double ss = 0.0;
    for (double g : gaps) ss += (g - out.mean_sup_gap) * (g - out.mean_sup_gap);
    out.stderr_ = std::sqrt(ss / (count - 1.0) / count);
    out.max_audit_excess = *std::max_element(excess.begin(), excess.end());
    return out;
}

void write_rescaled_csv(std::ostream& os, const RescaledPath& path) {
    os << "t,F\n";
    for (std::size_t i = 0; i <= path.n; ++i) {
        os << fmt17(double(i) / double(path.n)) << ',' << fmt17(path.values[i]) << '\n';
    }
}

void write_increments_csv(std::ostream& os, const IncrementVector& inc) {
    os << "i,delta\n";
    for (std::size_t i = 0; i < inc.deltas.size(); ++i) os << i + 1 << ',' << fmt17(inc.deltas[i]) << '\n';
}

}  // namespace hawkes
