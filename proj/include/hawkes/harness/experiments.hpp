#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hawkes/harness/config.hpp"
#include "hawkes/malliavin.hpp"
#include "hawkes/rescaler.hpp"
#include "hawkes/wasserstein.hpp"

namespace hawkes::harness {

// A control cell with a known answer failed; the report is not trustworthy.
class ControlFailure : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Sigma2Source {
    double sigma2 = 0.0;
    double stderr_ = 0.0;
    bool closed_form = false;
};

// Closed form when available, otherwise stationary_sigma2 with the config's
// sigma2.* settings. Throws ValidationError when the standard error exceeds
// sigma2.stderr_tol.
Sigma2Source resolve_sigma2(const ExperimentConfig& cfg);

struct ConvergenceRow {
    double horizon = 0.0;
    std::size_t n = 0;
    double marginal_w1 = 0.0;
    double marginal_stderr = 0.0;  // grouped jackknife
    double functional_lb = 0.0;
    double functional_stderr = 0.0;
    double increment_lb = 0.0;
    double increment_stderr = 0.0;
    double marginal_ratio = 0.0;    // marginal_w1 / (ln T T^{-1/10})
    double functional_ratio = 0.0;  // functional_lb / (ln T T^{-1/10})
    FunctionalBound functional_detail;  // per-functional differences
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    Sigma2Source sigma2;
    double sigma_tilde2 = 0.0;
    double fitted_c = 0.0;  // max marginal_ratio
    double marginal_slope = 0.0;
    double functional_slope = 0.0;
    double control_value = 0.0;
    double control_threshold = 0.0;
    bool functional = false;
    bool below_envelope = true;  // functional_lb <= fitted_c ln T T^{-1/10} on every row
};

// ln(T) / T^{1/10}.
double rate_envelope(double horizon);

// Both runs share one set of replica paths per T (common random numbers:
// replica r uses the same field at every T). Throws ControlFailure when the
// control cell fails.
ConvergenceReport run_marginal_convergence(const ExperimentConfig& cfg);
ConvergenceReport run_functional_convergence(const ExperimentConfig& cfg);

struct LemmaRow {
    double horizon = 0.0;
    std::size_t n = 0;
    double lhs_mass = 0.0;  // (1/T^2) sum_i E[(int_{I_i} lambda)^2]
    double stderr_mass = 0.0;
    double shape_mass = 0.0;  // 1/T + 1/n
    double ratio_mass = 0.0;
    double lhs_dev = 0.0;  // sum_i E|sigma^2/n - (1/T) int_{I_i} lambda|
    double stderr_dev = 0.0;
    double shape_dev = 0.0;  // 1/T + sqrt(n/T)
    double ratio_dev = 0.0;
};

struct LemmaReport {
    std::vector<LemmaRow> rows;
    Sigma2Source sigma2;
    double fitted_c_mass = 0.0;  // max ratio
    double fitted_c_dev = 0.0;
    double spread_mass = 0.0;  // max ratio / min ratio; 0 when some ratio is 0
    double spread_dev = 0.0;
};

LemmaReport run_lemma_checks(const ExperimentConfig& cfg);

struct DiscretizeRow {
    std::size_t n = 0;
    DiscretizationError error;
};

struct DiscretizeReport {
    double horizon = 0.0;
    std::vector<DiscretizeRow> rows;
    double slope = 0.0;  // log mean gap vs log n
    bool non_increasing = true;
};

DiscretizeReport run_discretization(const ExperimentConfig& cfg);

struct MalliavinReport {
    std::vector<DerivativeBoundRow> rows;
    std::size_t pairs_checked = 0;
    std::size_t pairs_identical = 0;
    bool all_bounds_satisfied = true;
};

// Offsets default to 20 points k/2, k = 1..20.
MalliavinReport run_malliavin(const ExperimentConfig& cfg);

}  // namespace hawkes::harness
