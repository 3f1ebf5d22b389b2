#pragma once

// CSV writers for experiment reports and the run manifest. Numbers are
// written with 17 significant digits so that reruns compare byte-for-byte.

#include <cstdint>
#include <filesystem>
#include <ostream>
#include <string>

#include "hawkes/harness/experiments.hpp"

namespace hawkes::harness {

std::string fmt(double v);

// T,n,marginal_w1,marginal_stderr,functional_lb,functional_stderr,increment_lb,
// increment_stderr,marginal_ratio,functional_ratio,fitted_c,marginal_slope,functional_slope
void write_convergence_csv(std::ostream& os, const ConvergenceReport& report);

// T,n,lhs_mass,stderr_mass,shape_mass,ratio_mass,lhs_dev,stderr_dev,shape_dev,ratio_dev
void write_lemma_csv(std::ostream& os, const LemmaReport& report);

// T,n,mean_sup_gap,stderr,fourth_moment,max_audit_excess
void write_discretize_csv(std::ostream& os, const DiscretizeReport& report);

// key,value rows of model constants.
void write_constants_csv(std::ostream& os, const Model& model);

// Plain-text manifest: subcommand, config hash, seed, library version,
// compiler and the active SIMD variant.
void write_manifest(const std::filesystem::path& dir, const std::string& subcommand, const std::string& config_text,
                    std::uint64_t seed);

inline constexpr const char* kVersion = "0.1.0";

}  // namespace hawkes::harness
