#pragma once

// Difference-operator derivatives D_{(u,rho,x)} F = F(N + delta_{(u,rho,x)}) - F(N),
// computed by re-running the thinning construction on the same Poisson field
// with one added atom.

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <vector>

#include "hawkes/simulator.hpp"
#include "hawkes/stats.hpp"

namespace hawkes {

struct ShiftSpec {
    double u = 0.0;    // time of the added point, > 0
    double rho = 0.0;  // threshold coordinate, >= 0
    double x = 0.0;    // mark

    void validate() const;
};

struct DerivativePath {
    PathRecord base;
    PathRecord shifted;
    ShiftSpec spec;
    std::int64_t d_h = 0;  // H_T(shifted) - H_T(base)
    double d_l = 0.0;      // L_T(shifted) - L_T(base)

    // lambda(shifted)(t) - lambda(base)(t).
    double d_lambda(const Model& model, double t) const;
};

// Throws UnsupportedPathError when the path has no candidate log.
DerivativePath shift_and_resolve(const Model& model, const PathRecord& path, const ShiftSpec& spec,
                                 const PoissonField& field);

// True when the shifted paths for thresholds rho1 and rho2 have the same
// events apart from the threshold of the added point. Throws DomainError
// unless both thresholds are <= lambda_base(u).
bool theta_irrelevance_check(const Model& model, const PathRecord& path, double u, double rho1, double rho2,
                             double x, const PoissonField& field);

struct DerivativeBoundRow {
    double t_minus_u = 0.0;
    double estimate = 0.0;  // E_u |D lambda_t|
    double stderr_ = 0.0;
    double bound = 0.0;  // |b(x)| / m_b1 * psi(t - u)
    bool satisfied = false;  // estimate <= bound + 4 stderr
};

struct DerivativeBoundConfig {
    double u = 5.0;
    double x = 1.0;
    std::vector<double> offsets;  // t - u values, > 0
    std::size_t replicas = 5000;
    std::uint64_t master_seed = 1;
    FieldGeometry geometry{};
    double resolvent_step = 1e-3;
};

// Fixes the field on [0, u) from master_seed and averages |D_{(u,0,x)} lambda_t|
// over independent suffix fields.
std::vector<DerivativeBoundRow> derivative_bound_check(const Model& model, const DerivativeBoundConfig& cfg);

// d_H over (u, horizon] for the added point (u, 0, x), averaged over suffix
// replicas with a fixed prefix.
Summary progeny_summary(const Model& model, double u, double x, double horizon, std::size_t replicas,
                        std::uint64_t master_seed, const FieldGeometry& geometry = {});

void write_derivative_csv(std::ostream& os, std::span<const DerivativeBoundRow> rows);

}  // namespace hawkes
