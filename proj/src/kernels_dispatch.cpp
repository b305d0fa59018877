#include "bhchain/kernels.hpp"

#include <cstdlib>
#include <cstring>

namespace bhchain::kernels {

bool avx2_compiled_in() {
#if defined(BHCHAIN_BUILD_AVX2)
    return true;
#else
    return false;
#endif
}

namespace {

bool cpu_has_avx2() {
#if defined(BHCHAIN_BUILD_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2");
#else
    return false;
#endif
}

Backend resolve_backend() {
    const char* env = std::getenv("BHCHAIN_SIMD");
    if (env != nullptr) {
        if (std::strcmp(env, "scalar") == 0) return Backend::Scalar;
        if (std::strcmp(env, "avx2") == 0)
            return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
        // anything else (including "auto") falls through to detection
    }
    return cpu_has_avx2() ? Backend::Avx2 : Backend::Scalar;
}

KernelTable make_table(Backend b) {
    KernelTable t{};
    switch (b) {
#if defined(BHCHAIN_BUILD_AVX2)
        case Backend::Avx2:
            t.eom_rhs = &avx2::eom_rhs;
            t.eom_var_rhs = &avx2::eom_var_rhs;
            break;
#endif
        default:
            t.eom_rhs = &scalar::eom_rhs;
            t.eom_var_rhs = &scalar::eom_var_rhs;
            break;
    }
    return t;
}

}  // namespace

Backend active_backend() {
    static const Backend b = resolve_backend();
    return b;
}

const char* backend_name() {
    return active_backend() == Backend::Avx2 ? "avx2" : "scalar";
}

const KernelTable& table() {
    static const KernelTable t = make_table(active_backend());
    return t;
}

}  // namespace bhchain::kernels
