#pragma once

// Mark law, impact function b, claim function g, nonlinearity h and the moment
// constants m_{b,1..2}, m_{g,1..4}.

#include <array>
#include <string>
#include <variant>
#include <vector>

#include "hawkes/rng.hpp"

namespace hawkes {

struct ConstantMarks {
    double c = 1.0;
};
struct UniformMarks {
    double lo = 0.0;
    double hi = 1.0;
};
struct ExponentialMarks {
    double rate = 1.0;
};
struct DiscreteMarks {
    std::vector<double> values;
    std::vector<double> probs;
};

using MarkDistribution = std::variant<ConstantMarks, UniformMarks, ExponentialMarks, DiscreteMarks>;

enum class MarkFnKind { One, Identity, Square, AffineClamp };

// AffineClamp is max(0, slope * x + intercept).
struct MarkFunction {
    MarkFnKind kind = MarkFnKind::One;
    double slope = 1.0;
    double intercept = 0.0;

    double operator()(double x) const;
};

struct Moments {
    std::array<double, 2> m_b{};  // E|b(X)|^i, i = 1, 2
    std::array<double, 4> m_g{};  // E|g(X)|^i, i = 1..4
    // Zero when the closed form applies; Monte-Carlo standard error otherwise.
    std::array<double, 2> m_b_stderr{};
    std::array<double, 4> m_g_stderr{};
    bool b_closed_form = true;
    bool g_closed_form = true;
};

inline constexpr long kMomentMonteCarloDraws = 1'000'000;

class MarkModel {
public:
    // Validates the distribution and that g >= 0 on its support.
    MarkModel(MarkDistribution distribution, MarkFunction b, MarkFunction g);

    // Constant mark 1 with b = g = 1: the classical unmarked process.
    static MarkModel unit();

    const MarkDistribution& distribution() const { return dist_; }
    const MarkFunction& b() const { return b_; }
    const MarkFunction& g() const { return g_; }
    const Moments& moments() const { return moments_; }
    double m_b1() const { return moments_.m_b[0]; }
    double m_g1() const { return moments_.m_g[0]; }
    double m_g2() const { return moments_.m_g[1]; }

    // True when b(x) >= 0 on the whole support.
    bool b_nonnegative() const;

    // One draw from the mark law; consumes exactly one uniform.
    double sample(Xoshiro256& rng) const;

private:
    MarkDistribution dist_;
    MarkFunction b_;
    MarkFunction g_;
    Moments moments_;
};

// One draw from the mark law; consumes exactly one uniform.
double sample_mark(const MarkDistribution& dist, Xoshiro256& rng);

// Closed-form moments where available; 10^6-draw Monte Carlo otherwise.
Moments moments(const MarkModel& model);

// E|f(X)|^i for i = 1..4 by Monte Carlo, with standard errors.
struct MonteCarloMoments {
    std::array<double, 4> mean{};
    std::array<double, 4> stderr_{};
};
MonteCarloMoments monte_carlo_moments(const MarkDistribution& dist, const MarkFunction& f, long draws,
                                      std::uint64_t seed);

enum class NonlinearityKind { Linear, Relu, Sigmoid, Softplus };

// Linear: h(z) = z. Relu: max(z, floor). Sigmoid: cap / (1 + e^{-z}).
// Softplus: log(1 + e^{scale z}) / scale.
struct Nonlinearity {
    NonlinearityKind kind = NonlinearityKind::Linear;
    double floor = 0.0;
    double cap = 1.0;
    double scale = 1.0;

    double operator()(double z) const;
    // Exact Lipschitz constant of the family member.
    double lipschitz() const;
    std::string name() const;
};

// Upper bound h(mu) * (1 + rho/(1-rho)) = h(mu)/(1-rho) on E[lambda_t].
// Throws StabilityError when rho >= 1.
double mean_intensity_bound(double h_mu, double rho);

}  // namespace hawkes
