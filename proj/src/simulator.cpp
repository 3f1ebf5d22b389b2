#include "hawkes/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "hawkes/error.hpp"

namespace hawkes {

namespace {

// Relative slack on the envelope so rounding in the two sums can never flip
// lambda_bar below lambda.
constexpr double kEnvelopeSlack = 1e-12;

std::size_t strips_for(double bound, double width) {
    if (!(bound > 0.0)) return 0;
    return std::size_t(std::ceil(bound / width));
}

}  // namespace

std::size_t PathRecord::count_at(double t) const {
    auto it = std::upper_bound(events.begin(), events.end(), t, [](double v, const Event& e) { return v < e.t; });
    return std::size_t(it - events.begin());
}

double PathRecord::claims_at(double t, const MarkFunction& g) const {
    double acc = 0.0;
    for (const auto& e : events) {
        if (e.t > t) break;
        acc += g(e.mark);
    }
    return acc;
}

Excitation::Excitation(const Kernel& kernel) : kernel_(&kernel), cutoff_(kernel.support_cutoff()) {
    if (const auto* f = std::get_if<ExponentialFamily>(&kernel.family())) {
        exponential_ = true;
        a_ = f->a;
        beta_ = f->beta;
    }
}

void Excitation::add(double tau, double b) {
    if (exponential_) {
        const double decay = std::exp(-beta_ * (tau - t_ref_));
        s_ = s_ * decay + b;
        s_bar_ = s_bar_ * decay + std::fabs(b);
        t_ref_ = tau;
        return;
    }
    while (!window_.empty() && tau - window_.front().first > cutoff_) window_.pop_front();
    window_.emplace_back(tau, b);
}

double Excitation::xi(double t) const {
    if (exponential_) return a_ == 0.0 ? 0.0 : a_ * s_ * std::exp(-beta_ * (t - t_ref_));
    double acc = 0.0;
    for (const auto& [tau, b] : window_) {
        const double age = t - tau;
        if (age > cutoff_) continue;
        acc += (*kernel_)(age)*b;
    }
    return acc;
}

double Excitation::xi_bar(double t) const {
    if (exponential_) return a_ == 0.0 ? 0.0 : std::fabs(a_) * s_bar_ * std::exp(-beta_ * (t - t_ref_));
    double acc = 0.0;
    for (const auto& [tau, b] : window_) {
        const double age = t - tau;
        if (age > cutoff_) continue;
        acc += kernel_->majorant(age) * std::fabs(b);
    }
    return acc;
}

double intensity_at(const Model& model, std::span<const Event> events, double t) {
    double z = model.mu;
    for (const auto& e : events) {
        if (!(e.t < t)) break;
        z += model.kernel(t - e.t) * model.marks.b()(e.mark);
    }
    return model.h(z);
}

namespace {

PathRecord run_thinning(const Model& model, double horizon, const PoissonField& field, const PathRecord* prefix,
                        double start, const SimulationOptions& options) {
    if (!(horizon > 0.0)) throw DomainError("simulation horizon must be positive");
    if (start < 0.0 || start > horizon) throw DomainError("simulation start outside [0, T]");

    PathRecord rec;
    rec.horizon = horizon;
    rec.has_candidate_log = options.record_candidates;

    const MarkFunction& b = model.marks.b();
    Excitation ex(model.kernel);
    if (prefix != nullptr) {
        for (const auto& e : prefix->events) {
            if (!(e.t < start)) break;
            rec.events.push_back(e);
            ex.add(e.t, b(e.mark));
        }
        if (options.record_candidates) {
            for (const auto& c : prefix->candidates) {
                if (!(c.t < start)) break;
                rec.candidates.push_back(c);
            }
        }
    }

    const double h_mu = model.h_mu();
    const double alpha = model.alpha();
    const double width = field.geometry().strip_width;
    const double block_len = field.geometry().block_length;
    auto envelope = [&](double t) { return (h_mu + alpha * ex.xi_bar(t)) * (1.0 + kEnvelopeSlack); };
    auto intensity = [&](double t) { return model.h(model.mu + ex.xi(t)); };

    const auto& extras = field.extra_points();
    auto first_block = std::int64_t(std::floor(start / block_len));
    bool first = true;

    for (std::int64_t block = first_block; double(block) * block_len <= horizon; ++block) {
        const double lo = first ? start : double(block) * block_len;
        const double hi = double(block + 1) * block_len;
        double upper = envelope(lo);
        std::size_t strips = strips_for(upper, width);
        std::vector<FieldPoint> pending = field.strip_points(block, 0, strips, lo, true);
        bool merged_extras = false;
        for (const auto& p : extras) {
            if (p.t >= lo && p.t < hi) {
                pending.push_back(p);
                merged_extras = true;
            }
        }
        if (merged_extras) {
            std::stable_sort(pending.begin(), pending.end(),
                             [](const FieldPoint& x, const FieldPoint& y) { return x.t < y.t; });
        }
        first = false;

        std::size_t idx = 0;
        while (idx < pending.size()) {
            const FieldPoint p = pending[idx++];
            if (p.t > horizon) return rec;
            // lambda_bar is non-increasing between events, so the last value
            // computed bounds it from above.
            if (p.theta > upper) continue;
            const double bound = envelope(p.t);
            upper = bound;
            if (p.theta > bound) continue;
            // Added atoms are screened with the direct sum, the same value
            // callers see through intensity_at, so thresholds at lambda(u) exactly
            // are decided consistently.
            const bool added = !extras.empty() && std::find(extras.begin(), extras.end(), p) != extras.end();
            const double lam = added ? intensity_at(model, rec.events, p.t) : intensity(p.t);
            const bool accepted = p.theta <= lam;
            if (options.record_candidates) rec.candidates.push_back({p.t, p.theta, p.mark, accepted});
            if (!accepted) continue;

            rec.events.push_back({p.t, p.theta, p.mark});
            ex.add(p.t, b(p.mark));
            if (rec.events.size() > options.event_cap) {
                std::ostringstream os;
                os << "event cap " << options.event_cap << " exceeded at t = " << p.t << " of horizon " << horizon
                   << " (envelope " << envelope(p.t) << ", rho " << model.rho() << ")";
                throw ExplosionError(os.str());
            }
            upper = envelope(p.t);
            const std::size_t needed = strips_for(upper, width);
            if (needed > strips) {
                std::vector<FieldPoint> more = field.strip_points(block, strips, needed, p.t, false);
                strips = needed;
                if (!more.empty()) {
                    std::vector<FieldPoint> rest(pending.begin() + std::ptrdiff_t(idx), pending.end());
                    std::vector<FieldPoint> joined;
                    joined.reserve(rest.size() + more.size());
                    std::merge(rest.begin(), rest.end(), more.begin(), more.end(), std::back_inserter(joined),
                               [](const FieldPoint& x, const FieldPoint& y) { return x.t < y.t; });
                    pending = std::move(joined);
                    idx = 0;
                }
            }
        }
    }
    return rec;
}

}  // namespace

PathRecord simulate_path(const Model& model, double horizon, const PoissonField& field,
                         const SimulationOptions& options) {
    return run_thinning(model, horizon, field, nullptr, 0.0, options);
}

PathRecord simulate_from(const Model& model, double horizon, const PoissonField& field, const PathRecord& prefix,
                         double start, const SimulationOptions& options) {
    if (options.record_candidates && !prefix.has_candidate_log) {
        throw UnsupportedPathError("prefix path has no candidate log");
    }
    return run_thinning(model, horizon, field, &prefix, start, options);
}

double majorant_violation(const Model& model, const PathRecord& path, std::span<const double> grid) {
    const MarkFunction& b = model.marks.b();
    Excitation ex(model.kernel);
    const double h_mu = model.h_mu();
    const double alpha = model.alpha();
    std::size_t next = 0;
    double worst = 0.0;
    for (double t : grid) {
        // Events strictly before t contribute to lambda(t) = lambda(t-).
        while (next < path.events.size() && path.events[next].t < t) {
            ex.add(path.events[next].t, b(path.events[next].mark));
            ++next;
        }
        const double lam = model.h(model.mu + ex.xi(t));
        const double bar = (h_mu + alpha * ex.xi_bar(t)) * (1.0 + kEnvelopeSlack);
        worst = std::max(worst, lam - bar);
    }
    return worst;
}

}  // namespace hawkes
