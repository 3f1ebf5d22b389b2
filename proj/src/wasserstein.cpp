#include "hawkes/wasserstein.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "hawkes/error.hpp"
#include "hawkes/rng.hpp"
#include "hawkes/simd/kernels.hpp"

namespace hawkes {

namespace {

double poly(const double* c, int degree, double x) {
    double acc = c[degree];
    for (int k = degree - 1; k >= 0; --k) acc = acc * x + c[k];
    return acc;
}

constexpr double kA[8] = {3.3871328727963666080e0, 1.3314166789178437745e+2, 1.9715909503065514427e+3,
                          1.3731693765509461125e+4, 4.5921953931549871457e+4, 6.7265770927008700853e+4,
                          3.3430575583588128105e+4, 2.5090809287301226727e+3};
constexpr double kB[8] = {1.0,
                          4.2313330701600911252e+1,
                          6.8718700749205790830e+2,
                          5.3941960214247511077e+3,
                          2.1213794301586595867e+4,
                          3.9307895800092710610e+4,
                          2.8729085735721942674e+4,
                          5.2264952788528545610e+3};
constexpr double kC[8] = {1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
                          3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
                          2.27238449892691845833e-2, 7.74545014278341407640e-4};
constexpr double kD[8] = {1.0,
                          2.05319162663775882187e0,
                          1.67638483018380384940e0,
                          6.89767334985100004550e-1,
                          1.48103976427480074590e-1,
                          1.51986665636164571966e-2,
                          5.47593808499534494600e-4,
                          1.05075007164441684324e-9};
constexpr double kE[8] = {6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
                          2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
                          2.71155556874348757815e-5, 2.01033439929228813265e-7};
constexpr double kF[8] = {1.0,
                          5.99832206555887937690e-1,
                          1.36929880922735805310e-1,
                          1.48753612908506148525e-2,
                          7.86869131145613259100e-4,
                          1.84631831751005468180e-5,
                          1.42151175831644588870e-7,
                          2.04426310338993978564e-15};

constexpr double kSoftSupBeta = 8.0;

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<double> sorted_copy(std::span<const double> x) {
    std::vector<double> out(x.begin(), x.end());
    std::sort(out.begin(), out.end());
    return out;
}

struct MeanVar {
    double mean = 0.0;
    double var = 0.0;
};

MeanVar mean_var(const std::vector<double>& x) {
    MeanVar out;
    for (double v : x) out.mean += v;
    out.mean /= double(x.size());
    if (x.size() > 1) {
        for (double v : x) out.var += (v - out.mean) * (v - out.mean);
        out.var /= double(x.size() - 1);
    }
    return out;
}

}  // namespace

double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw DomainError("normal quantile needs p in (0, 1)");
    const double q = p - 0.5;
    if (std::fabs(q) <= 0.425) {
        const double r = 0.180625 - q * q;
        return q * poly(kA, 7, r) / poly(kB, 7, r);
    }
    double r = std::sqrt(-std::log(q < 0.0 ? p : 1.0 - p));
    double val;
    if (r <= 5.0) {
        r -= 1.6;
        val = poly(kC, 7, r) / poly(kD, 7, r);
    } else {
        r -= 5.0;
        val = poly(kE, 7, r) / poly(kF, 7, r);
    }
    return q < 0.0 ? -val : val;
}

double w1_empirical_1d(std::span<const double> a, std::span<const double> b) {
    if (a.empty() || b.empty()) throw DomainError("W1 of an empty sample");
    auto sa = sorted_copy(a);
    auto sb = sorted_copy(b);
    if (sa.size() != sb.size()) {
        auto& big = sa.size() > sb.size() ? sa : sb;
        const std::size_t n = std::min(sa.size(), sb.size());
        const std::size_t m = big.size();
        std::vector<double> reduced(n);
        for (std::size_t i = 0; i < n; ++i) reduced[i] = big[(2 * i + 1) * m / (2 * n)];
        big = std::move(reduced);
    }
    return simd::abs_diff_sum(sa, sb) / double(sa.size());
}

double w1_vs_gaussian_1d(std::span<const double> samples, double mean, double var) {
    if (!(var > 0.0)) throw DomainError("Gaussian variance must be positive");
    if (samples.empty()) throw DomainError("W1 of an empty sample");
    const auto s = sorted_copy(samples);
    const std::size_t n = s.size();
    const double sd = std::sqrt(var);
    std::vector<double> q(n);
    for (std::size_t i = 0; i < n; ++i) q[i] = mean + sd * normal_quantile((double(i) + 0.5) / double(n));
    return simd::abs_diff_sum(s, q) / double(n);
}

void GaussianReference::validate() const {
    if (!(sigma_tilde2 > 0.0)) throw DomainError("reference variance must be positive");
    if (n == 0) throw DomainError("reference dimension must be positive");
}

std::vector<double> GaussianReference::sample_increments(std::uint64_t seed, std::size_t index) const {
    validate();
    Xoshiro256 rng(mix_key({seed, index, 0x6272776eULL}));
    const double sd = std::sqrt(sigma_tilde2 / double(n));
    std::vector<double> out(n);
    for (auto& v : out) v = sd * normal_quantile((double(rng() >> 11) + 0.5) * 0x1.0p-53);
    return out;
}

std::vector<double> GaussianReference::sample_levels(std::uint64_t seed, std::size_t index) const {
    return chi_levels(sample_increments(seed, index));
}

double apply_functional(TestFunctional f, std::span<const double> levels) {
    if (levels.size() < 2) throw DomainError("functional needs at least one subdivision interval");
    const std::size_t n = levels.size() - 1;
    switch (f) {
        case TestFunctional::Terminal: return levels[n];
        case TestFunctional::Sup: return *std::max_element(levels.begin(), levels.end());
        case TestFunctional::SupAbs: {
            double m = 0.0;
            for (double v : levels) m = std::max(m, std::fabs(v));
            return m;
        }
        case TestFunctional::NegInf: return -*std::min_element(levels.begin(), levels.end());
        case TestFunctional::Quarter: return levels[subdivision_index(0.25, n)];
        case TestFunctional::Half: return levels[subdivision_index(0.5, n)];
        case TestFunctional::ThreeQuarter: return levels[subdivision_index(0.75, n)];
        case TestFunctional::Mean: {
            double acc = 0.0;
            for (std::size_t i = 0; i < n; ++i) acc += levels[i];
            return acc / double(n);
        }
        case TestFunctional::ClipTerminal: return std::clamp(levels[n], -1.0, 1.0);
        case TestFunctional::TanhTerminal: return std::tanh(levels[n]);
        case TestFunctional::SoftSup: {
            const double top = *std::max_element(levels.begin(), levels.end());
            double acc = 0.0;
            for (double v : levels) acc += std::exp(kSoftSupBeta * (v - top));
            return top + std::log(acc) / kSoftSupBeta;
        }
    }
    return 0.0;
}

std::string functional_name(TestFunctional f) {
    switch (f) {
        case TestFunctional::Terminal: return "terminal";
        case TestFunctional::Sup: return "sup";
        case TestFunctional::SupAbs: return "sup_abs";
        case TestFunctional::NegInf: return "neg_inf";
        case TestFunctional::Quarter: return "x_quarter";
        case TestFunctional::Half: return "x_half";
        case TestFunctional::ThreeQuarter: return "x_three_quarter";
        case TestFunctional::Mean: return "mean";
        case TestFunctional::ClipTerminal: return "clip_terminal";
        case TestFunctional::TanhTerminal: return "tanh_terminal";
        case TestFunctional::SoftSup: return "soft_sup";
    }
    return "unknown";
}

std::vector<TestFunctional> default_functional_family() {
    return {TestFunctional::Terminal,     TestFunctional::Sup,  TestFunctional::SupAbs,
            TestFunctional::NegInf,       TestFunctional::Quarter, TestFunctional::Half,
            TestFunctional::ThreeQuarter, TestFunctional::Mean, TestFunctional::ClipTerminal,
            TestFunctional::TanhTerminal, TestFunctional::SoftSup};
}

FunctionalBound functional_w1_lower_bound(std::span<const std::vector<double>> a,
                                          std::span<const std::vector<double>> b,
                                          std::span<const TestFunctional> family) {
    if (family.empty()) throw DomainError("empty test-functional family");
    if (a.empty() || b.empty()) throw DomainError("functional bound needs nonempty sample sets");
    const std::size_t len = a.front().size();
    for (const auto& s : a)
        if (s.size() != len) throw DomainError("path dimension mismatch");
    for (const auto& s : b)
        if (s.size() != len) throw DomainError("path dimension mismatch");

    FunctionalBound out;
    std::vector<double> fa(a.size());
    std::vector<double> fb(b.size());
    bool first = true;
    for (TestFunctional f : family) {
        for (std::size_t i = 0; i < a.size(); ++i) fa[i] = apply_functional(f, a[i]);
        for (std::size_t i = 0; i < b.size(); ++i) fb[i] = apply_functional(f, b[i]);
        const MeanVar ma = mean_var(fa);
        const MeanVar mb = mean_var(fb);
        FunctionalValue v{f, std::fabs(ma.mean - mb.mean),
                          std::sqrt(ma.var / double(a.size()) + mb.var / double(b.size()))};
        out.per_functional.push_back(v);
        if (first || v.difference > out.value) {
            out.value = v.difference;
            out.stderr_ = v.stderr_;
            first = false;
        }
    }
    return out;
}

FunctionalBound functional_w1_lower_bound(std::span<const RescaledPath> paths, const GaussianReference& reference,
                                          std::size_t count, std::uint64_t seed,
                                          std::span<const TestFunctional> family) {
    std::vector<std::vector<double>> a;
    a.reserve(paths.size());
    for (const auto& p : paths) {
        if (p.n != reference.n) throw DomainError("path dimension mismatch");
        a.push_back(p.values);
    }
    std::vector<std::vector<double>> b(count);
    for (std::size_t i = 0; i < count; ++i) b[i] = reference.sample_levels(seed, i);
    return functional_w1_lower_bound(a, b, family);
}

FunctionalBound increment_vector_w1_lower_bound(std::span<const IncrementVector> increments,
                                                const GaussianReference& reference, std::size_t count,
                                                std::uint64_t seed, std::span<const TestFunctional> family) {
    std::vector<std::vector<double>> a;
    a.reserve(increments.size());
    for (const auto& inc : increments) {
        if (inc.deltas.size() != reference.n) throw DomainError("increment dimension mismatch");
        a.push_back(chi_levels(inc.deltas));
    }
    std::vector<std::vector<double>> b(count);
    for (std::size_t i = 0; i < count; ++i) b[i] = reference.sample_levels(seed, i);
    return functional_w1_lower_bound(a, b, family);
}

void write_functional_csv(std::ostream& os, const FunctionalBound& bound) {
    os << "functional_name,estimate,stderr\n";
    for (const auto& v : bound.per_functional) {
        os << functional_name(v.functional) << ',' << fmt17(v.difference) << ',' << fmt17(v.stderr_) << '\n';
    }
}

}  // namespace hawkes
