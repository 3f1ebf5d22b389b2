#pragma once

// Exact simulation of (L, H, lambda) on [0, T] by thinning a Poisson field:
// a field point (t, theta, x) becomes an event iff theta <= lambda(t-). Points
// are screened against the Lipschitz envelope
//   lambda_bar(t) = h(mu) + alpha * sum majorant(t - tau_i) |b(x_i)|,
// which dominates lambda because |h(mu + z) - h(mu)| <= alpha |z|.

#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <span>
#include <vector>

#include "hawkes/field.hpp"
#include "hawkes/model.hpp"

namespace hawkes {

struct Event {
    double t = 0.0;
    double theta = 0.0;
    double mark = 0.0;

    friend bool operator==(const Event&, const Event&) = default;
};

// A field point that passed the envelope screen, with its thinning outcome.
struct Candidate {
    double t = 0.0;
    double theta = 0.0;
    double mark = 0.0;
    bool accepted = false;

    friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct PathRecord {
    double horizon = 0.0;
    std::vector<Event> events;          // strictly increasing t, all <= horizon
    std::vector<Candidate> candidates;  // includes every event
    bool has_candidate_log = true;
    // Lambda(t_j) on the grid set by attach_compensator_checkpoints.
    std::vector<double> checkpoint_times;
    std::vector<double> compensator_checkpoints;

    // H_t: number of events in (0, t].
    std::size_t count_at(double t) const;
    // L_t: sum of g(x_i) over events in (0, t].
    double claims_at(double t, const MarkFunction& g) const;
};

inline constexpr std::size_t kDefaultEventCap = 10'000'000;

struct SimulationOptions {
    std::size_t event_cap = kDefaultEventCap;
    bool record_candidates = true;
};

// Running excitation sums over accepted events:
//   xi(t)     = sum phi(t - tau_i) b(x_i)
//   xi_bar(t) = sum majorant(t - tau_i) |b(x_i)|
// Exponential kernels use the O(1) decay recursion over the full history;
// other kernels sum the events younger than the kernel's support cutoff.
// Queries must be at times >= the last added event.
class Excitation {
public:
    explicit Excitation(const Kernel& kernel);

    void add(double tau, double b);
    double xi(double t) const;
    double xi_bar(double t) const;

private:
    const Kernel* kernel_;
    bool exponential_ = false;
    double a_ = 0.0;
    double beta_ = 0.0;
    double t_ref_ = 0.0;
    double s_ = 0.0;
    double s_bar_ = 0.0;
    double cutoff_ = 0.0;
    std::deque<std::pair<double, double>> window_;  // (tau, b)
};

// lambda(t) = h(mu + sum_{tau_i < t} phi(t - tau_i) b(x_i)) by direct summation.
double intensity_at(const Model& model, std::span<const Event> events, double t);

// Runs the thinning construction on [0, T]. Throws ExplosionError when the
// number of events exceeds options.event_cap.
PathRecord simulate_path(const Model& model, double horizon, const PoissonField& field,
                         const SimulationOptions& options = {});

// Continues the construction from `start`, keeping the events and candidates
// of `prefix` strictly before `start`. Equivalent to simulate_path when the
// prefix was produced from the same field on [0, start).
PathRecord simulate_from(const Model& model, double horizon, const PoissonField& field, const PathRecord& prefix,
                         double start, const SimulationOptions& options = {});

// Largest violation max(lambda(t) - lambda_bar(t), 0) on the grid, computed
// with the simulator's own envelope. Zero for a valid majorant.
double majorant_violation(const Model& model, const PathRecord& path, std::span<const double> grid);

enum class CompensatorMethod { Auto, Quadrature };

// Default quadrature step: T * 1e-5 capped at 1e-2.
double default_quad_step(double horizon);

// Lambda(t) = int_0^t lambda_s ds. Closed form for h = Id with an exponential
// kernel (Auto); otherwise composite Simpson between event times with step
// <= quad_step. Throws DomainError for quad_step <= 0 or t outside [0, T].
double compensator(const Model& model, const PathRecord& path, double t, double quad_step,
                   CompensatorMethod method = CompensatorMethod::Auto);

struct CompensatorTrace {
    // Lambda(tau_i) for events up to the last query (all events if there
    // are no queries).
    std::vector<double> at_events;
    std::vector<double> at_queries;  // Lambda(q_j), queries nondecreasing
};

CompensatorTrace compensator_trace(const Model& model, const PathRecord& path, std::span<const double> queries,
                                   double quad_step, CompensatorMethod method = CompensatorMethod::Auto);

void attach_compensator_checkpoints(const Model& model, PathRecord& path, std::span<const double> grid,
                                    double quad_step);

struct Sigma2Estimate {
    double sigma2 = 0.0;
    double stderr_ = 0.0;
    std::optional<double> closed_form;  // mu / (1 - ||phi||_1) for h = Id, b = 1, phi >= 0
    bool precision_warning = false;
};

// Default burn-in 50 * m / ||phi||_1 (0 for the zero kernel).
double default_burn_in(const Kernel& kernel);

// Time-average of lambda over [burn_in, horizon], averaged over replicas
// driven by PoissonField::for_replica(master_seed, r, ...).
Sigma2Estimate stationary_sigma2(const Model& model, double burn_in, double horizon, std::size_t replicas,
                                 std::uint64_t master_seed, const FieldGeometry& geometry = {},
                                 double quad_step = 0.0, double stderr_tol = 0.0);

}  // namespace hawkes
