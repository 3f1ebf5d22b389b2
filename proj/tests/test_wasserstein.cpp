#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <boost/math/distributions/normal.hpp>
#include <gtest/gtest.h>

#include "hawkes/error.hpp"
#include "hawkes/wasserstein.hpp"

using namespace hawkes;

namespace {

// Optimal assignment cost by exhaustive search over permutations.
double brute_force_w1(std::vector<double> a, const std::vector<double>& b) {
    std::vector<std::size_t> perm(a.size());
    std::iota(perm.begin(), perm.end(), 0);
    double best = 1e300;
    do {
        double cost = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) cost += std::fabs(a[i] - b[perm[i]]);
        best = std::min(best, cost);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return best / double(a.size());
}

std::vector<std::vector<double>> reference_levels(const GaussianReference& ref, std::uint64_t seed, std::size_t count) {
    std::vector<std::vector<double>> out;
    for (std::size_t k = 0; k < count; ++k) out.push_back(ref.sample_levels(seed, k));
    return out;
}

}  // namespace

TEST(normal_quantile, matches_boost) {
    const boost::math::normal_distribution<double> nd;
    for (double p : {1e-300, 1e-20, 1e-8, 1e-3, 0.01, 0.0249, 0.025, 0.2, 0.425, 0.5, 0.575, 0.9, 0.975, 0.999,
                     1.0 - 1e-12}) {
        const double ref = boost::math::quantile(nd, p);
        EXPECT_NEAR(normal_quantile(p), ref, 1e-8 * std::max(1.0, std::fabs(ref))) << p;
    }
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(1e-12, 1.0 - 1e-12);
    for (int k = 0; k < 10000; ++k) {
        const double p = u(rng);
        EXPECT_NEAR(normal_quantile(p), boost::math::quantile(nd, p), 1e-8) << p;
    }
    EXPECT_THROW(normal_quantile(0.0), DomainError);
    EXPECT_THROW(normal_quantile(1.0), DomainError);
}

TEST(w1_empirical, examples) {
    const std::vector<double> a{0.3, -1.0, 2.5, 7.0};
    EXPECT_EQ(w1_empirical_1d(a, a), 0.0);
    EXPECT_EQ(w1_empirical_1d(std::vector<double>{1.5}, std::vector<double>{-2.0}), 3.5);
    EXPECT_THROW(w1_empirical_1d(std::vector<double>{}, a), DomainError);
}

TEST(w1_empirical, equals_brute_force_assignment) {
    std::mt19937_64 rng(2);
    std::uniform_int_distribution<int> val(-50, 50);
    for (int rep = 0; rep < 300; ++rep) {
        const std::size_t n = 1 + rep % 7;
        std::vector<double> a(n), b(n);
        for (auto& x : a) x = val(rng);
        for (auto& x : b) x = val(rng);
        // Integer inputs: both sides are exact sums of integers divided by n.
        EXPECT_EQ(w1_empirical_1d(a, b), brute_force_w1(a, b));
    }
}

TEST(w1_empirical, triangle_inequality) {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> z;
    for (int rep = 0; rep < 200; ++rep) {
        const std::size_t n = 1 + rep % 40;
        std::vector<double> a(n), b(n), c(n);
        for (auto& x : a) x = z(rng);
        for (auto& x : b) x = 2.0 * z(rng) + 1.0;
        for (auto& x : c) x = std::exp(z(rng));
        EXPECT_LE(w1_empirical_1d(a, c), w1_empirical_1d(a, b) + w1_empirical_1d(b, c) + 1e-12);
    }
}

TEST(w1_empirical, unequal_sizes_use_order_statistics) {
    const std::vector<double> big{1, 2, 3, 4, 5, 6};
    const std::vector<double> small{2, 4, 6};
    EXPECT_EQ(w1_empirical_1d(big, small), w1_empirical_1d(small, big));
    EXPECT_GE(w1_empirical_1d(big, small), 0.0);
}

TEST(w1_gaussian, same_law_is_small) {
    std::mt19937_64 rng(4);
    const double var = 2.5;
    std::normal_distribution<double> z(1.0, std::sqrt(var));
    std::vector<double> s(100000);
    for (auto& x : s) x = z(rng);
    EXPECT_LT(w1_vs_gaussian_1d(s, 1.0, var), 0.02 * std::sqrt(var));
}

TEST(w1_gaussian, constant_samples_give_mean_absolute_deviation) {
    const double var = 3.0;
    const std::vector<double> s(20000, 0.7);
    // The midpoint quantile grid underestimates E|Z| by O(log N / N).
    EXPECT_NEAR(w1_vs_gaussian_1d(s, 0.7, var), std::sqrt(2.0 * var / M_PI), 2e-3);
}

TEST(w1_gaussian, translation_invariance_and_errors) {
    std::mt19937_64 rng(5);
    std::exponential_distribution<double> e;
    std::vector<double> s(1000);
    for (auto& x : s) x = e(rng);
    std::vector<double> shifted = s;
    for (auto& x : shifted) x += 4.0;
    EXPECT_NEAR(w1_vs_gaussian_1d(s, 1.0, 1.0), w1_vs_gaussian_1d(shifted, 5.0, 1.0), 1e-12);
    EXPECT_THROW(w1_vs_gaussian_1d(s, 0.0, 0.0), DomainError);
    EXPECT_THROW(w1_vs_gaussian_1d(std::vector<double>{}, 0.0, 1.0), DomainError);
}

TEST(reference, deterministic_increments_with_right_variance) {
    const GaussianReference ref{2.0, 8};
    EXPECT_EQ(ref.sample_levels(9, 3), ref.sample_levels(9, 3));
    EXPECT_NE(ref.sample_levels(9, 3), ref.sample_levels(9, 4));
    const auto lv = ref.sample_levels(9, 3);
    ASSERT_EQ(lv.size(), 9u);
    EXPECT_EQ(lv[0], 0.0);
    double sum = 0.0;
    double sq = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 0; k < 5000; ++k) {
        for (double d : ref.sample_increments(11, k)) {
            sum += d;
            sq += d * d;
            ++count;
        }
    }
    const double mean = sum / count;
    const double var = sq / count - mean * mean;
    EXPECT_NEAR(mean, 0.0, 4.0 * std::sqrt(0.25 / count));
    EXPECT_NEAR(var, 0.25, 4.0 * 0.25 * std::sqrt(2.0 / count));
    EXPECT_THROW((GaussianReference{0.0, 4}.validate()), DomainError);
    EXPECT_THROW((GaussianReference{1.0, 0}.validate()), DomainError);
}

TEST(functionals, one_lipschitz_on_random_pairs) {
    std::mt19937_64 rng(6);
    std::normal_distribution<double> z;
    const auto family = default_functional_family();
    EXPECT_EQ(family.size(), 11u);
    for (int rep = 0; rep < 10000; ++rep) {
        const std::size_t n = 1 + rep % 23;
        std::vector<double> x(n + 1), y(n + 1);
        double dist = 0.0;
        const double scale = rep % 2 ? 0.01 : 3.0;
        for (std::size_t i = 0; i <= n; ++i) {
            x[i] = 3.0 * z(rng);
            y[i] = x[i] + scale * z(rng);
            dist = std::max(dist, std::fabs(x[i] - y[i]));
        }
        for (auto f : family) {
            EXPECT_LE(std::fabs(apply_functional(f, x) - apply_functional(f, y)), dist * (1.0 + 1e-12) + 1e-15)
                << functional_name(f);
        }
    }
}

TEST(functionals, values_on_a_known_path) {
    // levels on n = 4: t in [0, 1/4) -> 0, [1/4, 1/2) -> 1, [1/2, 3/4) -> -2, [3/4, 1) -> 3, t = 1 -> 0.5
    const std::vector<double> lv{0.0, 1.0, -2.0, 3.0, 0.5};
    EXPECT_EQ(apply_functional(TestFunctional::Terminal, lv), 0.5);
    EXPECT_EQ(apply_functional(TestFunctional::Sup, lv), 3.0);
    EXPECT_EQ(apply_functional(TestFunctional::SupAbs, lv), 3.0);
    EXPECT_EQ(apply_functional(TestFunctional::NegInf, lv), 2.0);
    EXPECT_EQ(apply_functional(TestFunctional::Quarter, lv), 1.0);
    EXPECT_EQ(apply_functional(TestFunctional::Half, lv), -2.0);
    EXPECT_EQ(apply_functional(TestFunctional::ThreeQuarter, lv), 3.0);
    EXPECT_EQ(apply_functional(TestFunctional::Mean, lv), 0.5);
    EXPECT_EQ(apply_functional(TestFunctional::ClipTerminal, lv), 0.5);
    EXPECT_NEAR(apply_functional(TestFunctional::TanhTerminal, lv), std::tanh(0.5), 1e-15);
    EXPECT_THROW(apply_functional(TestFunctional::Sup, std::vector<double>{0.0}), DomainError);
}

TEST(functional_bound, reference_against_reference_is_null) {
    const GaussianReference ref{1.7, 12};
    const auto a = reference_levels(ref, 1, 2000);
    const auto b = reference_levels(ref, 2, 2000);
    const auto family = default_functional_family();
    const auto bound = functional_w1_lower_bound(a, b, family);
    for (const auto& v : bound.per_functional)
        EXPECT_LE(v.difference, 4.0 * v.stderr_) << functional_name(v.functional);
}

TEST(functional_bound, detects_translation) {
    const GaussianReference ref{1.0, 10};
    auto a = reference_levels(ref, 3, 2000);
    const auto b = reference_levels(ref, 4, 2000);
    const double c = 0.3;
    for (auto& lv : a)
        for (auto& v : lv) v += c;
    const std::vector<TestFunctional> terminal{TestFunctional::Terminal};
    const auto bound = functional_w1_lower_bound(a, b, terminal);
    EXPECT_GE(bound.value, c - 4.0 * bound.stderr_);
}

TEST(functional_bound, enlarging_family_never_decreases) {
    const GaussianReference ref{1.0, 6};
    const auto a = reference_levels(ref, 5, 500);
    auto b = reference_levels(ref, 6, 500);
    for (auto& lv : b)
        for (auto& v : lv) v *= 1.3;
    const auto full = default_functional_family();
    double prev = 0.0;
    for (std::size_t k = 1; k <= full.size(); ++k) {
        const std::vector<TestFunctional> sub(full.begin(), full.begin() + k);
        const double v = functional_w1_lower_bound(a, b, sub).value;
        EXPECT_GE(v, prev);
        prev = v;
    }
    EXPECT_THROW(functional_w1_lower_bound(a, b, std::vector<TestFunctional>{}), DomainError);
}

TEST(increment_bound, one_coordinate_reduces_to_terminal_law) {
    const GaussianReference ref{2.0, 1};
    std::vector<IncrementVector> inc;
    std::mt19937_64 rng(7);
    std::exponential_distribution<double> e;
    for (int k = 0; k < 1000; ++k) inc.push_back({{quantize(e(rng) - 1.0)}});
    const auto family = default_functional_family();
    const auto bound = increment_vector_w1_lower_bound(inc, ref, 1000, 8, family);
    // With n = 1 every functional is a 1-Lipschitz function of the terminal value.
    std::vector<std::vector<double>> a, b;
    for (const auto& v : inc) a.push_back({0.0, v.deltas[0]});
    for (std::size_t k = 0; k < 1000; ++k) b.push_back(ref.sample_levels(8, k));
    const auto direct = functional_w1_lower_bound(a, b, family);
    EXPECT_EQ(bound.value, direct.value);
    std::vector<double> ta, tb;
    for (const auto& v : a) ta.push_back(v[1]);
    for (const auto& v : b) tb.push_back(v[1]);
    EXPECT_LE(bound.value, w1_empirical_1d(ta, tb) + 1e-12);
}

TEST(increment_bound, matches_functional_bound_bit_for_bit) {
    Model m;
    m.kernel = Kernel::exponential(0.5, 1.0);
    std::vector<RescaledPath> paths;
    std::vector<IncrementVector> inc;
    for (std::uint64_t r = 0; r < 300; ++r) {
        const auto path = simulate_path(m, 60.0, PoissonField::for_replica(4, r, m.marks.distribution()));
        paths.push_back(rescale(m, path, 60.0, 7));
        inc.push_back(increments(paths.back()));
    }
    const GaussianReference ref{2.0, 7};
    const auto family = default_functional_family();
    const auto fa = functional_w1_lower_bound(paths, ref, 300, 5, family);
    const auto fb = increment_vector_w1_lower_bound(inc, ref, 300, 5, family);
    ASSERT_EQ(fa.per_functional.size(), fb.per_functional.size());
    EXPECT_EQ(fa.value, fb.value);
    for (std::size_t k = 0; k < fa.per_functional.size(); ++k) {
        EXPECT_EQ(fa.per_functional[k].difference, fb.per_functional[k].difference);
        EXPECT_EQ(fa.per_functional[k].stderr_, fb.per_functional[k].stderr_);
    }
    const GaussianReference wrong{2.0, 8};
    EXPECT_THROW(increment_vector_w1_lower_bound(inc, wrong, 300, 5, family), DomainError);
}

TEST(functional_bound, csv_header) {
    const GaussianReference ref{1.0, 2};
    const auto a = reference_levels(ref, 1, 10);
    const auto b = reference_levels(ref, 2, 10);
    std::ostringstream os;
    write_functional_csv(os, functional_w1_lower_bound(a, b, default_functional_family()));
    EXPECT_EQ(os.str().substr(0, 32), "functional_name,estimate,stderr\n");
}
