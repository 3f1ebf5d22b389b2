#include "hawkes/model.hpp"

#include <sstream>

#include "hawkes/error.hpp"

namespace hawkes {

double stability_margin(const Kernel& kernel, const MarkModel& marks, const Nonlinearity& h) {
    return h.lipschitz() * marks.m_b1() * kernel.l1_norm();
}

double Model::rho() const { return stability_margin(kernel, marks, h); }

void Model::validate() const {
    const double r = rho();
    if (!(r < 1.0)) {
        std::ostringstream os;
        os << "alpha * m_b1 * ||phi||_1 = " << r << " >= 1";
        throw StabilityError(os.str());
    }
    if (h.kind == NonlinearityKind::Linear) {
        if (!(mu > 0.0)) throw ValidationError("linear nonlinearity requires mu > 0");
        if (!kernel.is_nonnegative()) throw ValidationError("linear nonlinearity requires a nonnegative kernel");
        if (!marks.b_nonnegative()) throw ValidationError("linear nonlinearity requires b >= 0 on the mark support");
    }
    if (h.kind == NonlinearityKind::Sigmoid && !(h.cap > 0.0)) {
        throw ValidationError("sigmoid cap must be positive");
    }
    if (h.kind == NonlinearityKind::Softplus && !(h.scale > 0.0)) {
        throw ValidationError("softplus scale must be positive");
    }
    if (h.kind == NonlinearityKind::Relu && !(h.floor >= 0.0)) {
        throw ValidationError("relu floor must be nonnegative");
    }
}

double mean_intensity_bound(const Model& model) { return mean_intensity_bound(model.h_mu(), model.rho()); }

}  // namespace hawkes
