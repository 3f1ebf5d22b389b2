#include "hawkes/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>

#include "hawkes/error.hpp"
#include "hawkes/simd/kernels.hpp"

namespace hawkes {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

double erlang_tail(double a, double beta, double t) {
    return std::fabs(a) * std::exp(-beta * t) * (t / beta + 1.0 / (beta * beta));
}

// Geometric extrapolation of the samples past the last grid point.
struct TabulatedTail {
    double mass = 0.0;
    double moment = 0.0;
};

TabulatedTail tabulated_tail(const TabulatedFamily& f) {
    const std::size_t n = f.values.size();
    const double last = std::fabs(f.values[n - 1]);
    if (last == 0.0) return {};
    const double prev = n >= 2 ? std::fabs(f.values[n - 2]) : 0.0;
    const double ratio = prev > 0.0 ? last / prev : std::numeric_limits<double>::infinity();
    if (ratio >= 1.0) {
        return {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    }
    const double t_max = f.step * double(n - 1);
    TabulatedTail tail;
    tail.mass = f.step * last * ratio / (1.0 - ratio);
    tail.moment = t_max * tail.mass + f.step * f.step * last * ratio / ((1.0 - ratio) * (1.0 - ratio));
    return tail;
}

}  // namespace

Kernel::Kernel(KernelFamily family, double tail_tol) : family_(std::move(family)), tail_tol_(tail_tol) {
    if (!(tail_tol > 0.0)) throw DomainError("kernel: tail tolerance must be positive");
    std::visit(
        overloaded{
            [&](const ExponentialFamily& f) {
                if (f.a == 0.0) return;
                if (!(f.beta > 0.0) || !std::isfinite(f.a)) {
                    throw ValidationError("exponential kernel requires beta > 0 and finite a");
                }
                const double aa = std::fabs(f.a);
                l1_ = aa / f.beta;
                moment_ = aa / (f.beta * f.beta);
                t_max_ = std::max(0.0, std::log(aa / (f.beta * tail_tol)) / f.beta);
                // Push past the rounding point so tail_mass <= tail_tol holds exactly.
                while (l1_ * std::exp(-f.beta * t_max_) > tail_tol) t_max_ = std::nextafter(t_max_ + 1e-12, 1e300);
                tail_mass_ = l1_ * std::exp(-f.beta * t_max_);
            },
            [&](const ErlangFamily& f) {
                if (f.a == 0.0) return;
                if (!(f.beta > 0.0) || !std::isfinite(f.a)) {
                    throw ValidationError("erlang kernel requires beta > 0 and finite a");
                }
                const double aa = std::fabs(f.a);
                l1_ = aa / (f.beta * f.beta);
                moment_ = 2.0 * aa / (f.beta * f.beta * f.beta);
                // The tail is decreasing in t; bracket then bisect.
                double lo = 0.0;
                double hi = 1.0 / f.beta;
                if (erlang_tail(f.a, f.beta, 0.0) <= tail_tol) {
                    hi = 0.0;
                } else {
                    while (erlang_tail(f.a, f.beta, hi) > tail_tol) {
                        lo = hi;
                        hi *= 2.0;
                    }
                    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
                        const double mid = 0.5 * (lo + hi);
                        (erlang_tail(f.a, f.beta, mid) > tail_tol ? lo : hi) = mid;
                    }
                }
                t_max_ = hi;
                tail_mass_ = erlang_tail(f.a, f.beta, t_max_);
            },
            [&](const TabulatedFamily& f) {
                if (!(f.step > 0.0)) throw ValidationError("tabulated kernel requires step > 0");
                if (f.values.empty()) throw ValidationError("tabulated kernel has no samples");
                for (double v : f.values) {
                    if (!std::isfinite(v)) throw ValidationError("tabulated kernel has non-finite sample");
                }
                const std::size_t n = f.values.size();
                t_max_ = f.step * double(n - 1);
                const TabulatedTail tail = tabulated_tail(f);
                if (!(tail.mass <= tail_tol)) {
                    std::ostringstream os;
                    os << "tabulated kernel is not integrable within tolerance: extrapolated tail mass "
                       << tail.mass << " exceeds " << tail_tol;
                    throw ValidationError(os.str());
                }
                tail_mass_ = tail.mass;
                double l1 = 0.0;
                double m = 0.0;
                for (std::size_t k = 0; k < n; ++k) {
                    const double w = (k == 0 || k + 1 == n) ? 0.5 : 1.0;
                    const double v = std::fabs(f.values[k]);
                    l1 += w * v;
                    m += w * v * f.step * double(k);
                }
                if (n == 1) {
                    l1 = 0.0;
                    m = 0.0;
                }
                l1_ = l1 * f.step + tail.mass;
                moment_ = m * f.step + tail.moment;
                suffix_max_.resize(n);
                double run = 0.0;
                for (std::size_t k = n; k-- > 0;) {
                    run = std::max(run, std::fabs(f.values[k]));
                    suffix_max_[k] = run;
                }
            }},
        family_);
}

Kernel Kernel::exponential(double a, double beta, double tail_tol) {
    return Kernel(ExponentialFamily{a, beta}, tail_tol);
}

Kernel Kernel::erlang(double a, double beta, double tail_tol) {
    return Kernel(ErlangFamily{a, beta}, tail_tol);
}

Kernel Kernel::tabulated(double step, std::vector<double> values, double tail_tol) {
    return Kernel(TabulatedFamily{step, std::move(values)}, tail_tol);
}

Kernel Kernel::zero() { return Kernel(ExponentialFamily{0.0, 1.0}, kDefaultKernelTailTol); }

Kernel Kernel::from_csv(const std::filesystem::path& path, double tail_tol) {
    std::ifstream in(path);
    if (!in) throw ValidationError("cannot open kernel CSV: " + path.string());
    std::vector<double> ts;
    std::vector<double> vs;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ls(line);
        double t = 0.0;
        double v = 0.0;
        if (!(ls >> t >> v)) {
            if (ts.empty() && lineno == 1) continue;  // header
            throw ValidationError("kernel CSV " + path.string() + ": malformed line " + std::to_string(lineno));
        }
        ts.push_back(t);
        vs.push_back(v);
    }
    if (ts.size() < 2) throw ValidationError("kernel CSV needs at least two samples: " + path.string());
    if (ts.front() != 0.0) throw ValidationError("kernel CSV must start at t = 0: " + path.string());
    const double step = ts[1] - ts[0];
    for (std::size_t k = 1; k < ts.size(); ++k) {
        if (std::fabs((ts[k] - ts[k - 1]) - step) > 1e-9 * std::max(1.0, step * double(k))) {
            throw ValidationError("kernel CSV step is not uniform: " + path.string());
        }
    }
    return tabulated(step, std::move(vs), tail_tol);
}

double Kernel::operator()(double t) const {
    if (!(t >= 0.0)) throw DomainError("kernel evaluated at negative time");
    return std::visit(overloaded{[&](const ExponentialFamily& f) {
                                     return f.a == 0.0 ? 0.0 : f.a * std::exp(-f.beta * t);
                                 },
                                 [&](const ErlangFamily& f) {
                                     return f.a == 0.0 ? 0.0 : f.a * t * std::exp(-f.beta * t);
                                 },
                                 [&](const TabulatedFamily& f) {
                                     if (t > t_max_) return 0.0;
                                     const double x = t / f.step;
                                     const auto k = std::min<std::size_t>(std::size_t(x), f.values.size() - 1);
                                     if (k + 1 >= f.values.size()) return f.values.back();
                                     const double w = x - double(k);
                                     return (1.0 - w) * f.values[k] + w * f.values[k + 1];
                                 }},
                      family_);
}

double Kernel::majorant(double t) const {
    if (!(t >= 0.0)) throw DomainError("kernel majorant evaluated at negative time");
    return std::visit(overloaded{[&](const ExponentialFamily& f) {
                                     return f.a == 0.0 ? 0.0 : std::fabs(f.a) * std::exp(-f.beta * t);
                                 },
                                 [&](const ErlangFamily& f) {
                                     if (f.a == 0.0) return 0.0;
                                     // |phi| peaks at 1/beta; flat running max before that.
                                     const double s = std::max(t, 1.0 / f.beta);
                                     return std::fabs(f.a) * s * std::exp(-f.beta * s);
                                 },
                                 [&](const TabulatedFamily& f) {
                                     if (t > t_max_) return 0.0;
                                     const auto k = std::min<std::size_t>(std::size_t(t / f.step),
                                                                          suffix_max_.size() - 1);
                                     return suffix_max_[k];
                                 }},
                      family_);
}

bool Kernel::is_nonnegative() const {
    return std::visit(overloaded{[](const ExponentialFamily& f) { return f.a >= 0.0; },
                                 [](const ErlangFamily& f) { return f.a >= 0.0; },
                                 [](const TabulatedFamily& f) {
                                     return std::all_of(f.values.begin(), f.values.end(),
                                                        [](double v) { return v >= 0.0; });
                                 }},
                      family_);
}

double kernel_eval(const Kernel& kernel, double t) { return kernel(t); }

L1AndMoment kernel_l1_and_moment(const Kernel& kernel) {
    return {kernel.l1_norm(), kernel.first_moment()};
}

std::vector<double> abs_kernel_grid(const Kernel& kernel, double step) {
    if (!(step > 0.0)) throw DomainError("grid step must be positive");
    const auto n = std::size_t(std::ceil(kernel.support_cutoff() / step - 1e-9)) + 1;
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = std::fabs(kernel(step * double(k)));
    return out;
}

std::vector<double> convolve_trapezoid(std::span<const double> f, std::span<const double> g, double step,
                                       std::size_t out_len) {
    if (!(step > 0.0)) throw DomainError("convolution step must be positive");
    std::vector<double> out(out_len, 0.0);
    if (f.empty() || g.empty()) return out;
    const std::size_t nf = f.size();
    const std::size_t ng = g.size();
    std::vector<double> grev(g.rbegin(), g.rend());
    for (std::size_t i = 0; i < out_len; ++i) {
        // j ranges over indices with 0 <= j < nf and 0 <= i - j < ng.
        const std::size_t jlo = i + 1 > ng ? i + 1 - ng : 0;
        const std::size_t jhi = std::min(i, nf - 1);
        if (jlo > jhi) break;
        const std::size_t len = jhi - jlo + 1;
        double acc = simd::dot(f.subspan(jlo, len),
                               std::span<const double>(grev).subspan(ng - 1 - i + jlo, len));
        const double fi = i < nf ? f[i] : 0.0;
        const double gi = i < ng ? g[i] : 0.0;
        acc -= 0.5 * (f[0] * gi + fi * g[0]);
        out[i] = step * acc;
    }
    return out;
}

std::vector<double> iterated_convolution(const Kernel& kernel, int k, double step) {
    if (k < 1) throw DomainError("iterated convolution requires k >= 1");
    if (!(step > 0.0)) throw DomainError("iterated convolution requires step > 0");
    const std::vector<double> base = abs_kernel_grid(kernel, step);
    const std::size_t span = base.size() - 1;
    std::vector<double> acc = base;
    for (int power = 2; power <= k; ++power) {
        acc = convolve_trapezoid(acc, base, step, span * std::size_t(power) + 1);
    }
    return acc;
}

double trapezoid_integral(std::span<const double> values, double step) {
    if (values.size() < 2) return 0.0;
    return step * (simd::sum(values) - 0.5 * (values.front() + values.back()));
}

double Resolvent::operator()(double t) const {
    if (!(t >= 0.0)) throw DomainError("resolvent evaluated at negative time");
    if (values.empty()) return 0.0;
    const double x = t / step;
    if (x > double(values.size() - 1)) return 0.0;
    const auto k = std::size_t(x);
    if (k + 1 >= values.size()) return values.back();
    const double w = x - double(k);
    return (1.0 - w) * values[k] + w * values[k + 1];
}

double resolvent_l1_closed_form(double alpha, double m_b1, double l1) {
    const double rho = alpha * m_b1 * l1;
    if (!(rho < 1.0)) throw StabilityError("alpha * m_b1 * ||phi||_1 = " + std::to_string(rho) + " >= 1");
    return rho / (1.0 - rho);
}

double resolvent_decay_rate(const Kernel& kernel, double rho) {
    if (kernel.is_zero() || rho <= 0.0) return std::numeric_limits<double>::infinity();
    if (!(rho < 1.0)) throw StabilityError("decay rate requested for rho >= 1");
    const double c = rho / kernel.l1_norm();
    return std::visit(
        overloaded{[&](const ExponentialFamily& f) { return f.beta - c * std::fabs(f.a); },
                   [&](const ErlangFamily& f) { return f.beta - std::sqrt(c * std::fabs(f.a)); },
                   [&](const TabulatedFamily& f) {
                       auto transform = [&](double gamma) {
                           double acc = 0.0;
                           const std::size_t n = f.values.size();
                           for (std::size_t k = 0; k < n; ++k) {
                               const double w = (k == 0 || k + 1 == n) ? 0.5 : 1.0;
                               const double t = f.step * double(k);
                               acc += w * std::fabs(f.values[k]) * std::exp(gamma * t);
                           }
                           return c * acc * f.step;
                       };
                       double lo = 0.0;
                       double hi = 1.0 / std::max(kernel.support_cutoff(), f.step);
                       while (transform(hi) < 1.0) {
                           lo = hi;
                           hi *= 2.0;
                       }
                       for (int it = 0; it < 200; ++it) {
                           const double mid = 0.5 * (lo + hi);
                           (transform(mid) < 1.0 ? lo : hi) = mid;
                       }
                       return lo;
                   }},
        kernel.family());
}

Resolvent build_resolvent(const Kernel& kernel, double alpha, double m_b1, double step, double tail_tol,
                          double horizon) {
    if (!(step > 0.0)) throw DomainError("resolvent step must be positive");
    if (!(tail_tol > 0.0)) throw DomainError("resolvent tail tolerance must be positive");
    if (alpha < 0.0 || m_b1 < 0.0) throw DomainError("alpha and m_b1 must be nonnegative");
    const double rho = alpha * m_b1 * kernel.l1_norm();
    if (!(rho < 1.0)) throw StabilityError("alpha * m_b1 * ||phi||_1 = " + std::to_string(rho) + " >= 1");

    Resolvent out;
    out.step = step;
    out.rho = rho;
    out.truncation_order = 1;

    if (rho == 0.0) {
        const double h = std::max(horizon, kernel.support_cutoff());
        out.values.assign(std::size_t(std::ceil(h / step)) + 1, 0.0);
        return out;
    }

    if (!(horizon > 0.0)) {
        const double gamma = resolvent_decay_rate(kernel, rho);
        const double excess = std::max(rho / ((1.0 - rho) * tail_tol), 1.0);
        horizon = std::max(kernel.support_cutoff(), std::log(excess) / gamma + 2.0 / gamma);
    }
    const auto n = std::size_t(std::ceil(horizon / step)) + 1;
    const double c = alpha * m_b1;

    std::vector<double> power(n);
    for (std::size_t k = 0; k < n; ++k) power[k] = c * std::fabs(kernel(step * double(k)));
    std::vector<double> partial = power;

    auto tail = [&](int order) { return std::pow(rho, order + 1) / (1.0 - rho); };
    int order = 1;
    // Doubling: S_{2K} = S_K + P_K * S_K and P_{2K} = P_K * P_K, where
    // P_K = c^K |phi|^{*K} and S_K = sum_{k=1..K} P_k.
    while (tail(order) > tail_tol) {
        std::vector<double> cross = convolve_trapezoid(power, partial, step, n);
        simd::axpy(1.0, cross, partial);
        if (tail(2 * order) > tail_tol) power = convolve_trapezoid(power, power, step, n);
        order *= 2;
    }
    for (double& v : partial) v = std::max(v, 0.0);

    out.values = std::move(partial);
    out.truncation_order = order;
    out.tail_bound = tail(order);
    out.l1_norm = trapezoid_integral(out.values, step);
    return out;
}

}  // namespace hawkes
