#pragma once

// The rescaled martingale F^(T)_t = (L_{tT} - m_{g,1} Lambda(tT)) / sqrt(T) on
// the subdivision t_i = i/n, its piecewise-constant projection Pi_n, increment
// vectors and the norm ||x||_{inf,1} = max_i |x_0 + ... + x_i|.

#include <cstddef>
#include <functional>
#include <ostream>
#include <span>
#include <vector>

#include "hawkes/simulator.hpp"

namespace hawkes {

// Rescaled values are rounded to multiples of 2^-40 so that increments and
// their partial sums are exact in double precision.
inline constexpr double kRescaleQuantum = 0x1.0p-40;

double quantize(double v);

struct RescaledPath {
    double horizon = 0.0;
    std::size_t n = 0;
    std::vector<double> values;     // F at t_i, i = 0..n; values[0] = 0
    double sup_norm_estimate = 0.0;  // sup over [0, 1] of |F|, from the breakpoint set
};

struct IncrementVector {
    std::vector<double> deltas;  // values[i] - values[i-1], i = 1..n
};

// Throws DomainError for n = 0 or horizon outside (0, path.horizon].
RescaledPath rescale(const Model& model, const PathRecord& path, double horizon, std::size_t n,
                     double quad_step = 0.0);

IncrementVector increments(const RescaledPath& path);

// Partial sums (0, d_1, d_1 + d_2, ...): the grid levels of chi(d).
std::vector<double> chi_levels(std::span<const double> deltas);

// A step function on [0, 1] constant on [i/n, (i+1)/n), with a separate value
// at t = 1.
struct StepPath {
    std::vector<double> levels;  // n + 1 entries

    std::size_t n() const { return levels.size() - 1; }
    double operator()(double t) const;
};

// Index i with t in [i/n, (i+1)/n), or n at t = 1.
std::size_t subdivision_index(double t, std::size_t n);

// Pi_n(x)_t = sum x(t_i) 1_{[t_i, t_{i+1})}(t) + x(t_n) 1_{t = 1}.
StepPath pi_n(const std::function<double(double)>& x, std::size_t n);

// max_{i < n} |x_0 + ... + x_i|. DomainError on empty input.
double norm_inf1(std::span<const double> x);

struct SupGap {
    double value = 0.0;   // sup_t |F_t - Pi_n(F)_t|
    double argmax = 0.0;  // in [0, 1]
    bool at_event = false;
};

// Exact sup of |F - Pi_n F| over [0, 1]: F is monotone between events, so the
// sup is attained at a grid point or at an event time (either side of the jump).
SupGap sup_gap(const Model& model, const PathRecord& path, double horizon, std::size_t n, double quad_step = 0.0);

// The same gap evaluated on the uniform audit grid k * spacing. Throws
// ValidationError when spacing > 1 / (10 n).
double audit_sup_gap(const Model& model, const PathRecord& path, double horizon, std::size_t n, double spacing,
                     double quad_step = 0.0);

struct DiscretizationError {
    double mean_sup_gap = 0.0;
    double stderr_ = 0.0;
    double fourth_moment = 0.0;  // E[gap^4]
    double max_audit_excess = 0.0;  // max over paths of (audit gap - exact gap); <= 0 up to rounding
};

// Monte-Carlo estimate over >= 100 paths. audit_spacing <= 0 selects 1/(10n).
DiscretizationError discretization_error(const Model& model, std::span<const PathRecord> paths, double horizon,
                                         std::size_t n, double audit_spacing = 0.0, double quad_step = 0.0);

void write_rescaled_csv(std::ostream& os, const RescaledPath& path);
void write_increments_csv(std::ostream& os, const IncrementVector& inc);

}  // namespace hawkes
