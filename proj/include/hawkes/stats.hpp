#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace hawkes {

struct Summary {
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double stderr_ = 0.0;
    std::size_t count = 0;
};

Summary summarize(std::span<const double> x);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t count = 0;
};

// One-sample Kolmogorov-Smirnov test against a continuous CDF. The p-value
// uses the asymptotic Kolmogorov distribution at (sqrt(n) + 0.12 + 0.11/sqrt(n)) D.
KsResult ks_test(std::span<const double> samples, const std::function<double(double)>& cdf);

// P(K > x) for the Kolmogorov distribution.
double kolmogorov_survival(double x);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
};

// Least squares y = intercept + slope * x. Needs two distinct x values.
LinearFit fit_line(std::span<const double> x, std::span<const double> y);

}  // namespace hawkes
