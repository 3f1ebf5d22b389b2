#include "hawkes/malliavin.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hawkes/error.hpp"
#include "hawkes/parallel.hpp"

namespace hawkes {

namespace {

constexpr std::uint64_t kPrefixTag = 0x707265666978ULL;
constexpr std::uint64_t kSuffixTag = 0x737566666978ULL;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

PoissonField prefix_field(const Model& model, std::uint64_t master_seed, const FieldGeometry& geometry) {
    return PoissonField(mix_key({master_seed, kPrefixTag}), model.marks.distribution(), geometry);
}

}  // namespace

void ShiftSpec::validate() const {
    if (!(u > 0.0)) throw DomainError("shift time u must be positive");
    if (!(rho >= 0.0)) throw DomainError("shift threshold rho must be nonnegative");
}

double DerivativePath::d_lambda(const Model& model, double t) const {
    return intensity_at(model, shifted.events, t) - intensity_at(model, base.events, t);
}

DerivativePath shift_and_resolve(const Model& model, const PathRecord& path, const ShiftSpec& spec,
                                 const PoissonField& field) {
    if (!path.has_candidate_log) throw UnsupportedPathError("shift needs a path recorded with its candidate log");
    spec.validate();
    DerivativePath out;
    out.base = path;
    out.spec = spec;
    if (spec.u > path.horizon) {
        out.shifted = path;
        return out;
    }
    const PoissonField shifted_field = field.with_point({spec.u, spec.rho, spec.x});
    out.shifted = simulate_from(model, path.horizon, shifted_field, path, spec.u);
    const double T = path.horizon;
    out.d_h = std::int64_t(out.shifted.count_at(T)) - std::int64_t(path.count_at(T));
    out.d_l = out.shifted.claims_at(T, model.marks.g()) - path.claims_at(T, model.marks.g());
    return out;
}

bool theta_irrelevance_check(const Model& model, const PathRecord& path, double u, double rho1, double rho2,
                             double x, const PoissonField& field) {
    const double lambda_u = intensity_at(model, path.events, u);
    if (!(rho1 >= 0.0 && rho2 >= 0.0 && rho1 <= lambda_u && rho2 <= lambda_u)) {
        throw DomainError("theta irrelevance needs 0 <= rho1, rho2 <= lambda(u)");
    }
    const auto a = shift_and_resolve(model, path, {u, rho1, x}, field).shifted.events;
    const auto b = shift_and_resolve(model, path, {u, rho2, x}, field).shifted.events;
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i].t != b[i].t || a[i].mark != b[i].mark) return false;
        if (a[i].t != u && a[i].theta != b[i].theta) return false;
    }
    return true;
}

std::vector<DerivativeBoundRow> derivative_bound_check(const Model& model, const DerivativeBoundConfig& cfg) {
    model.validate();
    if (cfg.offsets.empty()) throw DomainError("derivative check needs a nonempty t grid");
    if (cfg.replicas < 2) throw DomainError("derivative check needs at least two replicas");
    for (double d : cfg.offsets) {
        if (!(d > 0.0)) throw DomainError("t - u offsets must be positive");
    }
    const double max_offset = *std::max_element(cfg.offsets.begin(), cfg.offsets.end());
    const double horizon = cfg.u + max_offset;

    const PoissonField base_field = prefix_field(model, cfg.master_seed, cfg.geometry);
    const PathRecord prefix = simulate_path(model, cfg.u, base_field);

    std::vector<std::vector<double>> abs_d(cfg.replicas, std::vector<double>(cfg.offsets.size()));
    parallel_for(cfg.replicas, [&](std::size_t r) {
        const PoissonField field = base_field.with_suffix(cfg.u, mix_key({cfg.master_seed, r, kSuffixTag}));
        const PathRecord base = simulate_from(model, horizon, field, prefix, cfg.u);
        const DerivativePath d = shift_and_resolve(model, base, {cfg.u, 0.0, cfg.x}, field);
        for (std::size_t j = 0; j < cfg.offsets.size(); ++j) {
            abs_d[r][j] = std::fabs(d.d_lambda(model, cfg.u + cfg.offsets[j]));
        }
    });

    const double m_b1 = model.marks.m_b1();
    const double weight = m_b1 > 0.0 ? std::fabs(model.marks.b()(cfg.x)) / m_b1 : 0.0;
    Resolvent psi;
    if (!model.kernel.is_zero() && m_b1 > 0.0) {
        psi = build_resolvent(model.kernel, model.alpha(), m_b1, cfg.resolvent_step, 1e-10,
                              max_offset + cfg.resolvent_step);
    }

    std::vector<DerivativeBoundRow> rows;
    std::vector<double> column(cfg.replicas);
    for (std::size_t j = 0; j < cfg.offsets.size(); ++j) {
        for (std::size_t r = 0; r < cfg.replicas; ++r) column[r] = abs_d[r][j];
        const Summary s = summarize(column);
        DerivativeBoundRow row;
        row.t_minus_u = cfg.offsets[j];
        row.estimate = s.mean;
        row.stderr_ = s.stderr_;
        row.bound = psi.values.empty() ? 0.0 : weight * psi(cfg.offsets[j]);
        row.satisfied = row.estimate <= row.bound + 4.0 * row.stderr_;
        rows.push_back(row);
    }
    return rows;
}

Summary progeny_summary(const Model& model, double u, double x, double horizon, std::size_t replicas,
                        std::uint64_t master_seed, const FieldGeometry& geometry) {
    model.validate();
    if (!(horizon > u)) throw DomainError("progeny horizon must exceed u");
    const PoissonField base_field = prefix_field(model, master_seed, geometry);
    const PathRecord prefix = simulate_path(model, u, base_field);
    std::vector<double> dh(replicas);
    parallel_for(replicas, [&](std::size_t r) {
        const PoissonField field = base_field.with_suffix(u, mix_key({master_seed, r, kSuffixTag}));
        const PathRecord base = simulate_from(model, horizon, field, prefix, u);
        dh[r] = double(shift_and_resolve(model, base, {u, 0.0, x}, field).d_h);
    });
    return summarize(dh);
}

void write_derivative_csv(std::ostream& os, std::span<const DerivativeBoundRow> rows) {
    os << "t_minus_u,estimate,stderr,psi_bound,ok\n";
    for (const auto& r : rows) {
        os << fmt17(r.t_minus_u) << ',' << fmt17(r.estimate) << ',' << fmt17(r.stderr_) << ',' << fmt17(r.bound)
           << ',' << (r.satisfied ? 1 : 0) << '\n';
    }
}

}  // namespace hawkes
