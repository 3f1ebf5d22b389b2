#pragma once

// Flat "key = value" experiment configuration with dotted section prefixes.
// Lines starting with '#' are comments. Unknown keys are rejected.
//
//   model.mu                      real, default 1
//   kernel.family                 zero | exponential | erlang | tabulated
//   kernel.a, kernel.beta         parametric families
//   kernel.step, kernel.values    tabulated: step and comma-separated samples
//   kernel.csv                    tabulated from a two-column CSV file
//   kernel.tail_tol               default 1e-8
//   marks.distribution            constant | uniform | exponential | discrete
//   marks.c | marks.lo, marks.hi | marks.rate | marks.values, marks.probs
//   marks.b, marks.g              one | identity | square | affine_clamp
//   marks.b_slope, marks.b_intercept, marks.g_slope, marks.g_intercept
//   nonlinearity.family           linear | relu | sigmoid | softplus
//   nonlinearity.floor | .cap | .scale
//   experiment.T_grid             comma-separated, strictly increasing
//   experiment.n_rule             power (floor(T^{2/5}) + 1) | fixed (with experiment.n)
//   experiment.replicas           >= 100
//   experiment.reference_paths    Brownian reference sample size (default = replicas)
//   experiment.master_seed        u64
//   experiment.quad_step          0 selects min(T 1e-5, 1e-2)
//   experiment.output_dir
//   field.strip_width, field.block_length
//   sigma2.burn_in, sigma2.horizon, sigma2.replicas, sigma2.stderr_tol
//   malliavin.u, malliavin.x, malliavin.offsets, malliavin.replicas, malliavin.pairs
//   discretize.T, discretize.n_grid, discretize.replicas, discretize.audit_spacing
//   lemmas.T_grid, lemmas.n_grid, lemmas.replicas
//   simulate.T, simulate.replicas

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hawkes/field.hpp"
#include "hawkes/model.hpp"

namespace hawkes::harness {

enum class NRule { Power, Fixed };

// n = floor(T^{2/5}) + 1.
std::size_t power_rule_n(double horizon);

struct ExperimentConfig {
    Model model;
    FieldGeometry geometry{};

    std::vector<double> t_grid{50.0, 200.0, 800.0};
    NRule n_rule = NRule::Power;
    std::size_t fixed_n = 16;
    std::size_t replicas = 1000;
    std::size_t reference_paths = 0;  // 0: same as replicas
    std::uint64_t master_seed = 1;
    double quad_step = 0.0;
    std::filesystem::path output_dir = "out";

    double sigma2_burn_in = -1.0;  // < 0: default_burn_in(kernel)
    double sigma2_horizon = 2000.0;
    std::size_t sigma2_replicas = 200;
    double sigma2_stderr_tol = 0.05;

    double malliavin_u = 5.0;
    double malliavin_x = 1.0;
    std::vector<double> malliavin_offsets;  // empty: 20 points on (0, 10]
    std::size_t malliavin_replicas = 5000;
    std::size_t malliavin_pairs = 100;

    double discretize_t = 400.0;
    std::vector<std::size_t> discretize_n_grid{8, 16, 32, 64};
    std::size_t discretize_replicas = 1000;
    double discretize_audit_spacing = 0.0;

    std::vector<double> lemmas_t_grid{100.0, 400.0, 1600.0};
    std::vector<std::size_t> lemmas_n_grid{4, 8, 16};
    std::size_t lemmas_replicas = 200;

    double simulate_t = 100.0;
    std::size_t simulate_replicas = 1;

    std::size_t n_for(double horizon) const;
    std::size_t reference_count() const { return reference_paths == 0 ? replicas : reference_paths; }
    // Stability, grid ordering and replica-count checks.
    void validate() const;
};

// Raw key/value pairs in file order; duplicate keys are rejected.
std::map<std::string, std::string> parse_key_values(const std::string& text);

// Relative kernel.csv paths resolve against base_dir.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir = {});
ExperimentConfig load_config(const std::filesystem::path& path);

// FNV-1a 64-bit hash of the config text.
std::uint64_t config_hash(const std::string& text);

}  // namespace hawkes::harness
