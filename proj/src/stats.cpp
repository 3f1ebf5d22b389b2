#include "hawkes/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "hawkes/error.hpp"

namespace hawkes {

Summary summarize(std::span<const double> x) {
    Summary out;
    out.count = x.size();
    if (x.empty()) return out;
    for (double v : x) out.mean += v;
    out.mean /= double(x.size());
    if (x.size() > 1) {
        for (double v : x) out.variance += (v - out.mean) * (v - out.mean);
        out.variance /= double(x.size() - 1);
        out.stderr_ = std::sqrt(out.variance / double(x.size()));
    }
    return out;
}

double kolmogorov_survival(double x) {
    if (x <= 0.0) return 1.0;
    if (x < 1.18) {
        // Small-x form: sqrt(2 pi)/x sum exp(-(2k-1)^2 pi^2 / (8 x^2)).
        const double c = std::numbers::pi * std::numbers::pi / (8.0 * x * x);
        double acc = 0.0;
        for (int k = 1; k <= 20; ++k) acc += std::exp(-double((2 * k - 1) * (2 * k - 1)) * c);
        return std::clamp(1.0 - std::sqrt(2.0 * std::numbers::pi) / x * acc, 0.0, 1.0);
    }
    double acc = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * double(k) * double(k) * x * x);
        acc += (k % 2 == 1 ? 2.0 : -2.0) * term;
        if (term < 1e-18) break;
    }
    return std::clamp(acc, 0.0, 1.0);
}

KsResult ks_test(std::span<const double> samples, const std::function<double(double)>& cdf) {
    if (samples.empty()) throw DomainError("KS test of an empty sample");
    std::vector<double> s(samples.begin(), samples.end());
    std::sort(s.begin(), s.end());
    const double n = double(s.size());
    double d = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double f = cdf(s[i]);
        d = std::max({d, double(i + 1) / n - f, f - double(i) / n});
    }
    const double sn = std::sqrt(n);
    return {d, kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d), s.size()};
}

LinearFit fit_line(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw DomainError("line fit needs two or more paired points");
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= double(x.size());
    my /= double(y.size());
    double sxx = 0.0;
    double sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (!(sxx > 0.0)) throw DomainError("line fit needs two distinct x values");
    LinearFit out;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    return out;
}

}  // namespace hawkes
