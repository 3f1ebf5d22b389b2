#include "hawkes/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace hawkes::simd {

namespace {

struct Table {
    double (*dot)(const double*, const double*, std::size_t);
    double (*abs_diff_sum)(const double*, const double*, std::size_t);
    double (*sum)(const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
};

constexpr Table kScalar{scalar::dot, scalar::abs_diff_sum, scalar::sum, scalar::axpy};
#ifdef HAWKES_HAVE_AVX2
constexpr Table kAvx2{avx2::dot, avx2::abs_diff_sum, avx2::sum, avx2::axpy};
#endif

const Table& table_for(Isa isa) {
#ifdef HAWKES_HAVE_AVX2
    if (isa == Isa::Avx2) return kAvx2;
#endif
    (void)isa;
    return kScalar;
}

Isa detect() {
    if (const char* env = std::getenv("HAWKES_SIMD")) {
        if (std::string(env) == "scalar") return Isa::Scalar;
    }
    return isa_available(Isa::Avx2) ? Isa::Avx2 : Isa::Scalar;
}

std::atomic<const Table*> g_table{nullptr};
std::atomic<Isa> g_isa{Isa::Scalar};

const Table& current() {
    const Table* t = g_table.load(std::memory_order_acquire);
    if (t == nullptr) {
        Isa isa = detect();
        g_isa.store(isa, std::memory_order_relaxed);
        t = &table_for(isa);
        g_table.store(t, std::memory_order_release);
    }
    return *t;
}

void check_sizes(std::size_t a, std::size_t b) {
    if (a != b) throw std::invalid_argument("simd kernel: span length mismatch");
}

}  // namespace

std::string_view isa_name(Isa isa) {
    switch (isa) {
        case Isa::Scalar: return "scalar";
        case Isa::Avx2: return "avx2";
    }
    return "unknown";
}

bool isa_available(Isa isa) {
    if (isa == Isa::Scalar) return true;
#ifdef HAWKES_HAVE_AVX2
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Isa active_isa() {
    current();
    return g_isa.load(std::memory_order_relaxed);
}

void force_isa(Isa isa) {
    if (!isa_available(isa)) {
        throw std::runtime_error("simd: " + std::string(isa_name(isa)) + " not available on this CPU");
    }
    g_isa.store(isa, std::memory_order_relaxed);
    g_table.store(&table_for(isa), std::memory_order_release);
}

double dot(std::span<const double> a, std::span<const double> b) {
    check_sizes(a.size(), b.size());
    return current().dot(a.data(), b.data(), a.size());
}

double abs_diff_sum(std::span<const double> a, std::span<const double> b) {
    check_sizes(a.size(), b.size());
    return current().abs_diff_sum(a.data(), b.data(), a.size());
}

double sum(std::span<const double> a) { return current().sum(a.data(), a.size()); }

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    check_sizes(x.size(), y.size());
    current().axpy(alpha, x.data(), y.data(), x.size());
}

}  // namespace hawkes::simd
