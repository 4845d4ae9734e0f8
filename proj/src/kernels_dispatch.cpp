#include "adaptest/kernels.hpp"

#include "adaptest/common.hpp"

#include <atomic>
#include <cstdlib>
#include <mutex>

namespace adaptest::kernels {

namespace detail {

double max_sqrtk_gap_scalar(const double*, const double*, double, std::size_t, std::size_t);
double pi_candidate_max_scalar(const double*, std::size_t, double);

#if defined(__x86_64__) || defined(_M_X64)
double max_sqrtk_gap_avx2(const double*, const double*, double, std::size_t, std::size_t);
double pi_candidate_max_avx2(const double*, std::size_t, double);
#endif
#if defined(__aarch64__) && defined(__ARM_NEON)
double max_sqrtk_gap_neon(const double*, const double*, double, std::size_t, std::size_t);
double pi_candidate_max_neon(const double*, std::size_t, double);
#endif

} // namespace detail

namespace {

using GapFn = double (*)(const double*, const double*, double, std::size_t, std::size_t);
using PiFn = double (*)(const double*, std::size_t, double);

struct Vtable {
    GapFn gap;
    PiFn pi;
    Backend backend;
};

Vtable make_vtable(Backend b) {
    switch (b) {
#if defined(__x86_64__) || defined(_M_X64)
    case Backend::avx2:
        return {detail::max_sqrtk_gap_avx2, detail::pi_candidate_max_avx2, Backend::avx2};
#endif
#if defined(__aarch64__) && defined(__ARM_NEON)
    case Backend::neon:
        return {detail::max_sqrtk_gap_neon, detail::pi_candidate_max_neon, Backend::neon};
#endif
    default:
        return {detail::max_sqrtk_gap_scalar, detail::pi_candidate_max_scalar, Backend::scalar};
    }
}

Backend detect_best() {
    if (avx2_available())
        return Backend::avx2;
    if (neon_available())
        return Backend::neon;
    return Backend::scalar;
}

std::mutex vt_mutex;
Vtable storage;
std::atomic<const Vtable*> vt_ptr{nullptr};

const Vtable* init_vtable() {
    std::lock_guard<std::mutex> g(vt_mutex);
    const Vtable* existing = vt_ptr.load(std::memory_order_acquire);
    if (existing)
        return existing;
    Backend b = detect_best();
    if (const char* env = std::getenv("ADAPTEST_KERNELS")) {
        std::string want(env);
        if (want == "scalar")
            b = Backend::scalar;
        else if (want == "avx2" && avx2_available())
            b = Backend::avx2;
        else if (want == "neon" && neon_available())
            b = Backend::neon;
        // anything else (including "auto") keeps detection
    }
    storage = make_vtable(b);
    vt_ptr.store(&storage, std::memory_order_release);
    return &storage;
}

const Vtable& vt() {
    const Vtable* p = vt_ptr.load(std::memory_order_acquire);
    return p ? *p : *init_vtable();
}

} // namespace

bool avx2_available() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

bool neon_available() {
#if defined(__aarch64__) && defined(__ARM_NEON)
    return true;
#else
    return false;
#endif
}

double max_sqrtk_gap(const double* a, const double* b, double sub,
                     std::size_t k_lo, std::size_t k_hi) {
    return vt().gap(a, b, sub, k_lo, k_hi);
}

double pi_candidate_max(const double* sorted_pvals, std::size_t n, double pi0) {
    return vt().pi(sorted_pvals, n, pi0);
}

Backend active_backend() { return vt().backend; }

const char* backend_name(Backend b) {
    switch (b) {
    case Backend::avx2:
        return "avx2";
    case Backend::neon:
        return "neon";
    default:
        return "scalar";
    }
}

void force_backend(const std::string& name) {
    Backend b;
    if (name == "scalar")
        b = Backend::scalar;
    else if (name == "avx2") {
        if (!avx2_available())
            throw validation_error("kernels: avx2 backend not available on this CPU");
        b = Backend::avx2;
    } else if (name == "neon") {
        if (!neon_available())
            throw validation_error("kernels: neon backend not available on this CPU");
        b = Backend::neon;
    } else if (name == "auto" || name.empty()) {
        b = detect_best();
    } else {
        throw validation_error("kernels: unknown backend '" + name + "'");
    }
    std::lock_guard<std::mutex> g(vt_mutex);
    storage = make_vtable(b);
    vt_ptr.store(&storage, std::memory_order_release);
}

} // namespace adaptest::kernels
