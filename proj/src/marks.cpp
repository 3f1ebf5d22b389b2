#include "hawkes/marks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <sstream>

#include "hawkes/error.hpp"

namespace hawkes {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double factorial(int k) {
    double out = 1.0;
    for (int j = 2; j <= k; ++j) out *= j;
    return out;
}

// E|X|^p for X ~ U(lo, hi).
double uniform_abs_power(double lo, double hi, int p) {
    auto primitive = [p](double x) { return std::copysign(std::pow(std::fabs(x), p + 1), x) / (p + 1); };
    return (primitive(hi) - primitive(lo)) / (hi - lo);
}

std::optional<double> closed_moment(const MarkDistribution& dist, const MarkFunction& f, int i) {
    if (f.kind == MarkFnKind::One) return 1.0;
    return std::visit(
        overloaded{
            [&](const ConstantMarks& d) -> std::optional<double> { return std::pow(std::fabs(f(d.c)), i); },
            [&](const DiscreteMarks& d) -> std::optional<double> {
                double acc = 0.0;
                for (std::size_t k = 0; k < d.values.size(); ++k) {
                    acc += d.probs[k] * std::pow(std::fabs(f(d.values[k])), i);
                }
                return acc;
            },
            [&](const UniformMarks& d) -> std::optional<double> {
                switch (f.kind) {
                    case MarkFnKind::Identity: return uniform_abs_power(d.lo, d.hi, i);
                    case MarkFnKind::Square: return uniform_abs_power(d.lo, d.hi, 2 * i);
                    case MarkFnKind::AffineClamp: {
                        const double s = f.slope;
                        const double c = f.intercept;
                        if (s == 0.0) return std::pow(std::max(0.0, c), i);
                        double a = d.lo;
                        double b = d.hi;
                        if (s > 0.0) a = std::max(a, -c / s);
                        else b = std::min(b, -c / s);
                        if (a >= b) return 0.0;
                        auto primitive = [&](double x) { return std::pow(s * x + c, i + 1) / (s * (i + 1)); };
                        return (primitive(b) - primitive(a)) / (d.hi - d.lo);
                    }
                    case MarkFnKind::One: return 1.0;
                }
                return std::nullopt;
            },
            [&](const ExponentialMarks& d) -> std::optional<double> {
                switch (f.kind) {
                    case MarkFnKind::Identity: return factorial(i) / std::pow(d.rate, i);
                    case MarkFnKind::Square: return factorial(2 * i) / std::pow(d.rate, 2 * i);
                    case MarkFnKind::AffineClamp: {
                        const double s = f.slope;
                        const double c = f.intercept;
                        if (s == 0.0) return std::pow(std::max(0.0, c), i);
                        if (s < 0.0) return std::nullopt;
                        if (c < 0.0) {
                            // Memoryless shift past the root -c/s.
                            return std::exp(d.rate * c / s) * std::pow(s, i) * factorial(i) / std::pow(d.rate, i);
                        }
                        double acc = 0.0;
                        for (int j = 0; j <= i; ++j) {
                            const double binom = factorial(i) / (factorial(j) * factorial(i - j));
                            acc += binom * std::pow(s, j) * std::pow(c, i - j) * factorial(j) / std::pow(d.rate, j);
                        }
                        return acc;
                    }
                    case MarkFnKind::One: return 1.0;
                }
                return std::nullopt;
            }},
        dist);
}

void validate_distribution(const MarkDistribution& dist) {
    std::visit(overloaded{[](const ConstantMarks& d) {
                              if (!std::isfinite(d.c)) throw ValidationError("constant mark must be finite");
                          },
                          [](const UniformMarks& d) {
                              if (!(std::isfinite(d.lo) && std::isfinite(d.hi) && d.lo < d.hi)) {
                                  throw ValidationError("uniform marks require finite lo < hi");
                              }
                          },
                          [](const ExponentialMarks& d) {
                              if (!(d.rate > 0.0 && std::isfinite(d.rate))) {
                                  throw ValidationError("exponential marks require rate > 0");
                              }
                          },
                          [](const DiscreteMarks& d) {
                              if (d.values.empty() || d.values.size() != d.probs.size()) {
                                  throw ValidationError("discrete marks need equally many values and probs");
                              }
                              for (std::size_t k = 0; k < d.probs.size(); ++k) {
                                  if (!(d.probs[k] >= 0.0) || !std::isfinite(d.values[k])) {
                                      throw ValidationError("discrete marks: probs must be >= 0, values finite");
                                  }
                              }
                              const double total = std::accumulate(d.probs.begin(), d.probs.end(), 0.0);
                              if (std::fabs(total - 1.0) > 1e-12) {
                                  std::ostringstream os;
                                  os.precision(17);
                                  os << "discrete mark probabilities sum to " << total << ", not 1";
                                  throw ValidationError(os.str());
                              }
                          }},
               dist);
}

// Smallest value of f on the support (exact for the monotone menu members).
double support_min(const MarkDistribution& dist, const MarkFunction& f) {
    return std::visit(overloaded{[&](const ConstantMarks& d) { return f(d.c); },
                                 [&](const UniformMarks& d) {
                                     double lo = std::min(f(d.lo), f(d.hi));
                                     if (d.lo < 0.0 && d.hi > 0.0) lo = std::min(lo, f(0.0));
                                     return lo;
                                 },
                                 [&](const ExponentialMarks&) {
                                     // Support [0, inf); all menu functions are monotone there
                                     // except AffineClamp with negative slope, which clamps at 0.
                                     return f.kind == MarkFnKind::AffineClamp && f.slope < 0.0 ? 0.0 : f(0.0);
                                 },
                                 [&](const DiscreteMarks& d) {
                                     double lo = f(d.values.front());
                                     for (double v : d.values) lo = std::min(lo, f(v));
                                     return lo;
                                 }},
                      dist);
}

}  // namespace

double MarkFunction::operator()(double x) const {
    switch (kind) {
        case MarkFnKind::One: return 1.0;
        case MarkFnKind::Identity: return x;
        case MarkFnKind::Square: return x * x;
        case MarkFnKind::AffineClamp: return std::max(0.0, slope * x + intercept);
    }
    return 0.0;
}

MonteCarloMoments monte_carlo_moments(const MarkDistribution& dist, const MarkFunction& f, long draws,
                                      std::uint64_t seed) {
    if (draws < 2) throw DomainError("Monte-Carlo moments need at least two draws");
    validate_distribution(dist);
    Xoshiro256 rng(seed);
    std::array<double, 4> sum{};
    std::array<double, 4> sum_sq{};
    for (long k = 0; k < draws; ++k) {
        const double y = std::fabs(f(sample_mark(dist, rng)));
        double p = 1.0;
        for (int i = 0; i < 4; ++i) {
            p *= y;
            sum[i] += p;
            sum_sq[i] += p * p;
        }
    }
    MonteCarloMoments out;
    const double n = double(draws);
    for (int i = 0; i < 4; ++i) {
        out.mean[i] = sum[i] / n;
        const double var = std::max(0.0, (sum_sq[i] - n * out.mean[i] * out.mean[i]) / (n - 1.0));
        out.stderr_[i] = std::sqrt(var / n);
    }
    return out;
}

Moments moments(const MarkModel& model) { return model.moments(); }

MarkModel::MarkModel(MarkDistribution distribution, MarkFunction b, MarkFunction g)
    : dist_(std::move(distribution)), b_(b), g_(g) {
    validate_distribution(dist_);
    if (g_.kind == MarkFnKind::Identity && support_min(dist_, g_) < 0.0) {
        throw ValidationError("claim function g must be nonnegative on the mark support");
    }

    for (int i = 1; i <= 2; ++i) {
        if (auto m = closed_moment(dist_, b_, i)) {
            moments_.m_b[i - 1] = *m;
        } else {
            moments_.b_closed_form = false;
        }
    }
    for (int i = 1; i <= 4; ++i) {
        if (auto m = closed_moment(dist_, g_, i)) {
            moments_.m_g[i - 1] = *m;
        } else {
            moments_.g_closed_form = false;
        }
    }
    if (!moments_.b_closed_form) {
        const auto mc = monte_carlo_moments(dist_, b_, kMomentMonteCarloDraws, 0x6d6f6d656e74ULL);
        for (int i = 0; i < 2; ++i) {
            moments_.m_b[i] = mc.mean[i];
            moments_.m_b_stderr[i] = mc.stderr_[i];
        }
    }
    if (!moments_.g_closed_form) {
        const auto mc = monte_carlo_moments(dist_, g_, kMomentMonteCarloDraws, 0x6d6f6d656e75ULL);
        for (int i = 0; i < 4; ++i) {
            moments_.m_g[i] = mc.mean[i];
            moments_.m_g_stderr[i] = mc.stderr_[i];
        }
    }
    for (double m : moments_.m_g) {
        if (!std::isfinite(m)) throw ValidationError("g(X) must have a finite fourth moment");
    }
    for (double m : moments_.m_b) {
        if (!std::isfinite(m)) throw ValidationError("b(X) must have a finite second moment");
    }
}

MarkModel MarkModel::unit() { return MarkModel(ConstantMarks{1.0}, MarkFunction{}, MarkFunction{}); }

bool MarkModel::b_nonnegative() const { return support_min(dist_, b_) >= 0.0; }

double sample_mark(const MarkDistribution& dist, Xoshiro256& rng) {
    const double u = rng.uniform();
    return std::visit(overloaded{[&](const ConstantMarks& d) { return d.c; },
                                 [&](const UniformMarks& d) { return d.lo + (d.hi - d.lo) * u; },
                                 [&](const ExponentialMarks& d) { return -std::log1p(-u) / d.rate; },
                                 [&](const DiscreteMarks& d) {
                                     double cum = 0.0;
                                     for (std::size_t k = 0; k + 1 < d.values.size(); ++k) {
                                         cum += d.probs[k];
                                         if (u < cum) return d.values[k];
                                     }
                                     return d.values.back();
                                 }},
                      dist);
}

double MarkModel::sample(Xoshiro256& rng) const { return sample_mark(dist_, rng); }

double Nonlinearity::operator()(double z) const {
    switch (kind) {
        case NonlinearityKind::Linear: return z;
        case NonlinearityKind::Relu: return std::max(z, floor);
        case NonlinearityKind::Sigmoid: return cap / (1.0 + std::exp(-z));
        case NonlinearityKind::Softplus: {
            const double y = scale * z;
            // log(1 + e^y) without overflow.
            return (y > 0.0 ? y + std::log1p(std::exp(-y)) : std::log1p(std::exp(y))) / scale;
        }
    }
    return 0.0;
}

double Nonlinearity::lipschitz() const {
    switch (kind) {
        case NonlinearityKind::Linear:
        case NonlinearityKind::Relu:
        case NonlinearityKind::Softplus: return 1.0;
        case NonlinearityKind::Sigmoid: return cap / 4.0;
    }
    return 0.0;
}

std::string Nonlinearity::name() const {
    switch (kind) {
        case NonlinearityKind::Linear: return "linear";
        case NonlinearityKind::Relu: return "relu";
        case NonlinearityKind::Sigmoid: return "sigmoid";
        case NonlinearityKind::Softplus: return "softplus";
    }
    return "unknown";
}

double mean_intensity_bound(double h_mu, double rho) {
    if (!(rho < 1.0)) throw StabilityError("mean intensity bound requires rho < 1, got " + std::to_string(rho));
    return h_mu * (1.0 + rho / (1.0 - rho));
}

}  // namespace hawkes
