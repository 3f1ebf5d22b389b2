#pragma once

// Memory kernels phi: R+ -> R, their integrals, iterated self-convolutions and
// the Volterra resolvent psi = sum_{k>=1} c^k |phi|^{*k} with c = alpha * m_{b,1}.

#include <cstddef>
#include <filesystem>
#include <span>
#include <variant>
#include <vector>

namespace hawkes {

// phi(t) = a * exp(-beta * t)
struct ExponentialFamily {
    double a = 0.0;
    double beta = 1.0;
};

// phi(t) = a * t * exp(-beta * t)
struct ErlangFamily {
    double a = 0.0;
    double beta = 1.0;
};

// phi sampled at k * step, k = 0..N-1, linearly interpolated, 0 beyond.
struct TabulatedFamily {
    double step = 0.0;
    std::vector<double> values;
};

using KernelFamily = std::variant<ExponentialFamily, ErlangFamily, TabulatedFamily>;

inline constexpr double kDefaultKernelTailTol = 1e-8;

class Kernel {
public:
    static Kernel exponential(double a, double beta, double tail_tol = kDefaultKernelTailTol);
    static Kernel erlang(double a, double beta, double tail_tol = kDefaultKernelTailTol);
    // Throws ValidationError if the extrapolated tail mass beyond the last
    // sample exceeds tail_tol.
    static Kernel tabulated(double step, std::vector<double> values,
                            double tail_tol = kDefaultKernelTailTol);
    // Two-column CSV "t,phi" with uniform step starting at t = 0. A header
    // line is allowed.
    static Kernel from_csv(const std::filesystem::path& path,
                           double tail_tol = kDefaultKernelTailTol);
    static Kernel zero();

    // phi(t); DomainError for t < 0.
    double operator()(double t) const;

    // Non-increasing envelope with majorant(t) >= |phi(t)|.
    double majorant(double t) const;

    const KernelFamily& family() const { return family_; }
    double l1_norm() const { return l1_; }
    double first_moment() const { return moment_; }
    double support_cutoff() const { return t_max_; }
    // Upper bound on the integral of |phi| over [support_cutoff, inf).
    double tail_mass() const { return tail_mass_; }
    double tail_tol() const { return tail_tol_; }

    bool is_zero() const { return l1_ == 0.0; }
    bool is_nonnegative() const;

private:
    Kernel(KernelFamily family, double tail_tol);

    KernelFamily family_;
    double tail_tol_ = kDefaultKernelTailTol;
    double l1_ = 0.0;
    double moment_ = 0.0;
    double t_max_ = 0.0;
    double tail_mass_ = 0.0;
    std::vector<double> suffix_max_;  // tabulated only
};

double kernel_eval(const Kernel& kernel, double t);

struct L1AndMoment {
    double l1 = 0.0;
    double m = 0.0;
};

L1AndMoment kernel_l1_and_moment(const Kernel& kernel);

// |phi| sampled on k * step for k = 0..ceil(support_cutoff / step).
std::vector<double> abs_kernel_grid(const Kernel& kernel, double step);

// Trapezoid-rule convolution (f * g)(i * step) = int_0^{i step} f(s) g(i step - s) ds
// for i = 0..out_len-1, with f and g taken as 0 beyond their sample ranges.
std::vector<double> convolve_trapezoid(std::span<const double> f, std::span<const double> g,
                                       double step, std::size_t out_len);

// Grid values of |phi|^{*k} on [0, k * support_cutoff].
std::vector<double> iterated_convolution(const Kernel& kernel, int k, double step);

// Trapezoid integral of grid samples.
double trapezoid_integral(std::span<const double> values, double step);

struct Resolvent {
    double step = 0.0;
    std::vector<double> values;  // psi(k * step)
    double l1_norm = 0.0;
    int truncation_order = 0;  // K: highest convolution power summed
    double tail_bound = 0.0;   // rho^{K+1} / (1 - rho)
    double rho = 0.0;

    double horizon() const { return values.empty() ? 0.0 : step * double(values.size() - 1); }
    // Linear interpolation; 0 beyond the grid.
    double operator()(double t) const;
};

// Sums the series to the smallest K = 2^j with rho^{K+1}/(1-rho) <= tail_tol.
// horizon <= 0 selects a grid long enough that the resolvent mass beyond it is
// below tail_tol (from the exponential decay rate of the renewal equation).
// Throws StabilityError when rho >= 1.
Resolvent build_resolvent(const Kernel& kernel, double alpha, double m_b1, double step,
                          double tail_tol, double horizon = 0.0);

// rho / (1 - rho), the L1 norm of the resolvent. Throws StabilityError when rho >= 1.
double resolvent_l1_closed_form(double alpha, double m_b1, double l1);

// Decay rate gamma > 0 solving c * int |phi(t)| e^{gamma t} dt = 1, c = rho / ||phi||_1.
double resolvent_decay_rate(const Kernel& kernel, double rho);

}  // namespace hawkes
