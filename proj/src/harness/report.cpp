#include "hawkes/harness/report.hpp"

#include <cstdio>
#include <fstream>

#include "hawkes/error.hpp"
#include "hawkes/simd/kernels.hpp"

namespace hawkes::harness {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void write_convergence_csv(std::ostream& os, const ConvergenceReport& report) {
    os << "T,n,marginal_w1,marginal_stderr,functional_lb,functional_stderr,increment_lb,increment_stderr,"
          "marginal_ratio,functional_ratio,fitted_c,marginal_slope,functional_slope\n";
    for (const auto& r : report.rows) {
        os << fmt(r.horizon) << ',' << r.n << ',' << fmt(r.marginal_w1) << ',' << fmt(r.marginal_stderr) << ','
           << fmt(r.functional_lb) << ',' << fmt(r.functional_stderr) << ',' << fmt(r.increment_lb) << ','
           << fmt(r.increment_stderr) << ',' << fmt(r.marginal_ratio) << ',' << fmt(r.functional_ratio) << ','
           << fmt(report.fitted_c) << ',' << fmt(report.marginal_slope) << ',' << fmt(report.functional_slope)
           << '\n';
    }
}

void write_lemma_csv(std::ostream& os, const LemmaReport& report) {
    os << "T,n,lhs_mass,stderr_mass,shape_mass,ratio_mass,lhs_dev,stderr_dev,shape_dev,ratio_dev\n";
    for (const auto& r : report.rows) {
        os << fmt(r.horizon) << ',' << r.n << ',' << fmt(r.lhs_mass) << ',' << fmt(r.stderr_mass) << ','
           << fmt(r.shape_mass) << ',' << fmt(r.ratio_mass) << ',' << fmt(r.lhs_dev) << ',' << fmt(r.stderr_dev) << ','
           << fmt(r.shape_dev) << ',' << fmt(r.ratio_dev) << '\n';
    }
}

void write_discretize_csv(std::ostream& os, const DiscretizeReport& report) {
    os << "T,n,mean_sup_gap,stderr,fourth_moment,max_audit_excess\n";
    for (const auto& r : report.rows) {
        os << fmt(report.horizon) << ',' << r.n << ',' << fmt(r.error.mean_sup_gap) << ','
           << fmt(r.error.stderr_) << ',' << fmt(r.error.fourth_moment) << ',' << fmt(r.error.max_audit_excess)
           << '\n';
    }
}

void write_constants_csv(std::ostream& os, const Model& model) {
    const auto& m = model.marks.moments();
    const double rho = model.rho();
    os << "key,value\n";
    os << "rho," << fmt(rho) << '\n';
    os << "alpha," << fmt(model.alpha()) << '\n';
    os << "h_mu," << fmt(model.h_mu()) << '\n';
    os << "phi_l1," << fmt(model.kernel.l1_norm()) << '\n';
    os << "phi_first_moment," << fmt(model.kernel.first_moment()) << '\n';
    os << "psi_l1," << fmt(resolvent_l1_closed_form(model.alpha(), model.marks.m_b1(), model.kernel.l1_norm()))
       << '\n';
    os << "mean_intensity_bound," << fmt(mean_intensity_bound(model)) << '\n';
    for (int i = 0; i < 2; ++i) os << "m_b" << i + 1 << ',' << fmt(m.m_b[i]) << '\n';
    for (int i = 0; i < 4; ++i) os << "m_g" << i + 1 << ',' << fmt(m.m_g[i]) << '\n';
    os << "moments_closed_form," << (m.b_closed_form && m.g_closed_form ? 1 : 0) << '\n';
}

void write_manifest(const std::filesystem::path& dir, const std::string& subcommand, const std::string& config_text,
                    std::uint64_t seed) {
    std::filesystem::create_directories(dir);
    std::ofstream out(dir / "manifest.txt");
    if (!out) throw ValidationError("cannot write manifest in " + dir.string());
    char hash[20];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(config_text)));
    out << "subcommand = " << subcommand << '\n'
        << "config_hash = " << hash << '\n'
        << "seed = " << seed << '\n'
        << "version = " << kVersion << '\n'
        << "compiler = " << __VERSION__ << '\n'
        << "simd = " << simd::isa_name(simd::active_isa()) << '\n';
}

}  // namespace hawkes::harness
