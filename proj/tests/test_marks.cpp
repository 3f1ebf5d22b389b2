#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "hawkes/error.hpp"
#include "hawkes/marks.hpp"
#include "hawkes/model.hpp"

using namespace hawkes;

namespace {

const MarkFunction kOne{MarkFnKind::One};
const MarkFunction kIdentity{MarkFnKind::Identity};
const MarkFunction kSquare{MarkFnKind::Square};

MarkFunction affine(double s, double c) { return {MarkFnKind::AffineClamp, s, c}; }

}  // namespace

TEST(marks, constant_point_mass) {
    const MarkModel m(ConstantMarks{1.0}, kIdentity, kOne);
    EXPECT_EQ(m.moments().m_b[0], 1.0);
    EXPECT_EQ(m.moments().m_b[1], 1.0);
}

TEST(marks, uniform_identity_moments) {
    const MarkModel m(UniformMarks{0.0, 1.0}, kOne, kIdentity);
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(m.moments().m_g[i], 1.0 / (i + 2), 1e-15);
}

TEST(marks, exponential_identity_moments_are_factorials) {
    const MarkModel m(ExponentialMarks{1.0}, kOne, kIdentity);
    const double fact[4] = {1, 2, 6, 24};
    for (int i = 0; i < 4; ++i) EXPECT_NEAR(m.moments().m_g[i], fact[i], 1e-12);
}

TEST(marks, monte_carlo_agrees_with_closed_forms) {
    const std::vector<std::pair<MarkDistribution, MarkFunction>> cases{
        {UniformMarks{0.0, 2.0}, kIdentity},      {UniformMarks{-1.0, 3.0}, kSquare},
        {UniformMarks{-1.0, 3.0}, affine(2.0, -1.0)}, {ExponentialMarks{2.0}, kIdentity},
        {ExponentialMarks{1.5}, kSquare},         {ExponentialMarks{1.0}, affine(0.5, 0.25)},
        {ExponentialMarks{1.0}, affine(2.0, -1.0)}, {DiscreteMarks{{0.5, 1.0, 3.0}, {0.2, 0.5, 0.3}}, kIdentity},
    };
    std::uint64_t seed = 1;
    for (const auto& [dist, f] : cases) {
        const MarkModel m(dist, kOne, f);
        ASSERT_TRUE(m.moments().g_closed_form);
        const auto mc = monte_carlo_moments(dist, f, kMomentMonteCarloDraws, ++seed);
        for (int i = 0; i < 4; ++i) {
            EXPECT_NEAR(mc.mean[i], m.moments().m_g[i], 4.0 * mc.stderr_[i]) << "seed " << seed << " i " << i;
        }
    }
}

TEST(marks, monte_carlo_fallback_reports_stderr) {
    const MarkModel m(ExponentialMarks{1.0}, affine(-1.0, 2.0), kOne);
    EXPECT_FALSE(m.moments().b_closed_form);
    EXPECT_GT(m.moments().m_b_stderr[0], 0.0);
    // E max(0, 2 - X) = 2 - 1 + e^{-2} for X ~ Exp(1).
    EXPECT_NEAR(m.m_b1(), 1.0 + std::exp(-2.0), 4.0 * m.moments().m_b_stderr[0]);
}

TEST(marks, validation) {
    EXPECT_THROW(MarkModel(DiscreteMarks{{1.0, 2.0}, {0.5, 0.6}}, kOne, kOne), ValidationError);
    EXPECT_NO_THROW(MarkModel(DiscreteMarks{{1.0, 2.0}, {0.5, 0.5 + 1e-13}}, kOne, kOne));
    EXPECT_THROW(MarkModel(UniformMarks{-1.0, 1.0}, kOne, kIdentity), ValidationError);
    EXPECT_THROW(MarkModel(UniformMarks{1.0, 1.0}, kOne, kOne), ValidationError);
    EXPECT_THROW(MarkModel(ExponentialMarks{0.0}, kOne, kOne), ValidationError);
}

TEST(marks, sampling_consumes_one_uniform) {
    Xoshiro256 a(5);
    Xoshiro256 b(5);
    sample_mark(DiscreteMarks{{1.0, 2.0}, {0.5, 0.5}}, a);
    b.uniform();
    EXPECT_EQ(a(), b());
}

TEST(nonlinearity, positive_and_lipschitz_on_probe_pairs) {
    const std::vector<Nonlinearity> family{
        {NonlinearityKind::Linear},
        {NonlinearityKind::Relu, 0.0},
        {NonlinearityKind::Relu, 0.3},
        {NonlinearityKind::Sigmoid, 0.0, 4.0},
        {NonlinearityKind::Softplus, 0.0, 1.0, 0.5},
        {NonlinearityKind::Softplus, 0.0, 1.0, 3.0},
    };
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-20.0, 20.0);
    for (const auto& h : family) {
        for (int k = 0; k < 10000; ++k) {
            const double z1 = u(rng);
            const double z2 = u(rng);
            EXPECT_LE(std::fabs(h(z1) - h(z2)), h.lipschitz() * std::fabs(z1 - z2) * (1.0 + 1e-12)) << h.name();
            if (h.kind != NonlinearityKind::Linear) {
                EXPECT_GE(h(z1), 0.0) << h.name();
            }
        }
    }
    // Strictly positive members on the probe grid.
    for (double z = -20.0; z <= 20.0; z += 0.01) {
        EXPECT_GT(family[2](z), 0.0);
        EXPECT_GT(family[3](z), 0.0);
        EXPECT_GT(family[4](z), 0.0);
    }
}

TEST(nonlinearity, lipschitz_constants_are_tight) {
    const Nonlinearity sig{NonlinearityKind::Sigmoid, 0.0, 4.0};
    EXPECT_NEAR((sig(1e-6) - sig(-1e-6)) / 2e-6, sig.lipschitz(), 1e-6);
    const Nonlinearity sp{NonlinearityKind::Softplus, 0.0, 1.0, 2.0};
    EXPECT_NEAR((sp(30.0) - sp(29.0)), sp.lipschitz(), 1e-12);
}

TEST(model, stability_margin_examples) {
    Model m;
    m.kernel = Kernel::exponential(0.5, 1.0);
    EXPECT_DOUBLE_EQ(stability_margin(m.kernel, m.marks, m.h), 0.5);
    EXPECT_EQ(stability_margin(Kernel::zero(), m.marks, m.h), 0.0);
    const Nonlinearity sig{NonlinearityKind::Sigmoid, 0.0, 8.0};  // alpha = 2
    EXPECT_DOUBLE_EQ(stability_margin(m.kernel, m.marks, sig), 1.0);
    m.h = sig;
    EXPECT_THROW(m.validate(), StabilityError);
}

TEST(model, mean_intensity_bound_examples) {
    EXPECT_DOUBLE_EQ(mean_intensity_bound(1.0, 0.5), 2.0);
    EXPECT_DOUBLE_EQ(mean_intensity_bound(1.7, 0.0), 1.7);
    EXPECT_DOUBLE_EQ(mean_intensity_bound(3.0, 0.25), 4.0);
    EXPECT_THROW(mean_intensity_bound(1.0, 1.0), StabilityError);
}

TEST(model, linear_requires_nonnegative_inputs) {
    Model m;
    m.kernel = Kernel::exponential(-0.5, 1.0);
    EXPECT_THROW(m.validate(), ValidationError);
    m.kernel = Kernel::exponential(0.5, 1.0);
    m.mu = 0.0;
    EXPECT_THROW(m.validate(), ValidationError);
    m.mu = 1.0;
    m.marks = MarkModel(UniformMarks{-1.0, 1.0}, kIdentity, kOne);
    EXPECT_THROW(m.validate(), ValidationError);
    m.h = {NonlinearityKind::Relu};
    EXPECT_NO_THROW(m.validate());
}
