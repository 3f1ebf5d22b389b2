#pragma once

// Empirical 1-Wasserstein distances and Lipschitz-functional lower bounds for
// the path-space distance to a scaled Brownian motion.

#include <cstddef>
#include <cstdint>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "hawkes/rescaler.hpp"

namespace hawkes {

// Standard normal quantile, Wichura's AS241 (PPND16); relative accuracy about 1e-16.
double normal_quantile(double p);

// Exact W1 between two empirical measures of equal size by the sorted
// coupling. If sizes differ, the larger sample is reduced to the smaller size
// by taking evenly spaced order statistics. DomainError on empty input.
double w1_empirical_1d(std::span<const double> a, std::span<const double> b);

// W1 between the empirical law of the samples and N(mean, var), using the
// quantile coupling (1/N) sum |X_(i) - mean - sqrt(var) Phi^{-1}((i - 1/2)/N)|.
double w1_vs_gaussian_1d(std::span<const double> samples, double mean, double var);

// Brownian reference with increments N(0, sigma_tilde2 / n) on t_i = i/n.
struct GaussianReference {
    double sigma_tilde2 = 1.0;
    std::size_t n = 1;

    void validate() const;
    // Grid levels (0, G_1, G_1 + G_2, ...) of path number `index`; a pure
    // function of (seed, index).
    std::vector<double> sample_levels(std::uint64_t seed, std::size_t index) const;
    std::vector<double> sample_increments(std::uint64_t seed, std::size_t index) const;
};

enum class TestFunctional {
    Terminal,
    Sup,
    SupAbs,
    NegInf,
    Quarter,
    Half,
    ThreeQuarter,
    Mean,
    ClipTerminal,
    TanhTerminal,
    SoftSup,
};

// Applies f to the step path with the given grid levels (levels[i] on
// [i/n, (i+1)/n), levels[n] at t = 1). Every member is 1-Lipschitz for the
// sup norm.
double apply_functional(TestFunctional f, std::span<const double> levels);
std::string functional_name(TestFunctional f);
std::vector<TestFunctional> default_functional_family();

struct FunctionalValue {
    TestFunctional functional;
    double difference = 0.0;  // |mean f(A) - mean f(B)|
    double stderr_ = 0.0;
};

struct FunctionalBound {
    double value = 0.0;  // max over the family
    double stderr_ = 0.0;  // of the maximizing functional
    std::vector<FunctionalValue> per_functional;
};

// Sample sets are given as grid levels, one vector of n + 1 values per path.
FunctionalBound functional_w1_lower_bound(std::span<const std::vector<double>> a,
                                          std::span<const std::vector<double>> b,
                                          std::span<const TestFunctional> family);

// Rescaled paths against `count` reference paths drawn from `reference`.
FunctionalBound functional_w1_lower_bound(std::span<const RescaledPath> paths, const GaussianReference& reference,
                                          std::size_t count, std::uint64_t seed,
                                          std::span<const TestFunctional> family);

// Increment vectors against reference increments; functionals act on chi(x).
FunctionalBound increment_vector_w1_lower_bound(std::span<const IncrementVector> increments,
                                                const GaussianReference& reference, std::size_t count,
                                                std::uint64_t seed, std::span<const TestFunctional> family);

void write_functional_csv(std::ostream& os, const FunctionalBound& bound);

}  // namespace hawkes
