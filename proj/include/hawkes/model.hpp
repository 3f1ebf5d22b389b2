#pragma once

#include "hawkes/kernel.hpp"
#include "hawkes/marks.hpp"

namespace hawkes {

// Full parameter set (h, phi, b, g, mark law, mu) of a compound marked Hawkes
// process with intensity h(mu + sum phi(t - tau_i) b(x_i)).
struct Model {
    Kernel kernel = Kernel::zero();
    MarkModel marks = MarkModel::unit();
    Nonlinearity h{};
    double mu = 1.0;

    double h_mu() const { return h(mu); }
    double alpha() const { return h.lipschitz(); }
    double rho() const;

    // Throws StabilityError when rho >= 1 and ValidationError when the linear
    // nonlinearity is paired with a signed kernel, signed b, or mu <= 0.
    void validate() const;
};

// rho = alpha * m_{b,1} * ||phi||_1. Rejection of rho >= 1 is the caller's job.
double stability_margin(const Kernel& kernel, const MarkModel& marks, const Nonlinearity& h);

// h(mu) / (1 - rho).
double mean_intensity_bound(const Model& model);

}  // namespace hawkes
