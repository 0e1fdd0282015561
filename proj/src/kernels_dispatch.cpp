#include "matrixinfo/kernels.hpp"

#include "kernels_impl.hpp"
#include "matrixinfo/errors.hpp"

namespace matrixinfo::kernels {

namespace {

struct Table {
    double (*dot)(const double*, const double*, std::size_t);
    void (*axpy)(double, const double*, double*, std::size_t);
    void (*scal)(double, double*, std::size_t);
    double (*sum)(const double*, std::size_t);
    void (*rot)(double*, double*, std::size_t, double, double);
};

constexpr Table kScalarTable{detail::scalar_dot, detail::scalar_axpy,
                             detail::scalar_scal, detail::scalar_sum,
                             detail::scalar_rot};
constexpr Table kAvx2Table{detail::avx2_dot, detail::avx2_axpy,
                           detail::avx2_scal, detail::avx2_sum,
                           detail::avx2_rot};
constexpr Table kNeonTable{detail::neon_dot, detail::neon_axpy,
                           detail::neon_scal, detail::neon_sum,
                           detail::neon_rot};

bool cpu_has_avx2() {
#if defined(__x86_64__) || defined(_M_X64)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

Backend detect() {
    if (detail::avx2_compiled() && cpu_has_avx2()) return Backend::avx2;
    if (detail::neon_compiled()) return Backend::neon;
    return Backend::scalar;
}

Backend g_backend = detect();

const Table& table_for(Backend b) {
    switch (b) {
        case Backend::avx2: return kAvx2Table;
        case Backend::neon: return kNeonTable;
        default: return kScalarTable;
    }
}

}  // namespace

const char* backend_name(Backend b) {
    switch (b) {
        case Backend::avx2: return "avx2";
        case Backend::neon: return "neon";
        default: return "scalar";
    }
}

Backend active_backend() { return g_backend; }

bool backend_available(Backend b) {
    switch (b) {
        case Backend::scalar: return true;
        case Backend::avx2: return detail::avx2_compiled() && cpu_has_avx2();
        case Backend::neon: return detail::neon_compiled();
    }
    return false;
}

void force_backend(Backend b) {
    if (!backend_available(b)) {
        throw Error(std::string("kernel backend not available on this machine: ") +
                    backend_name(b));
    }
    g_backend = b;
}

void reset_backend() { g_backend = detect(); }

double dot(const double* x, const double* y, std::size_t n) {
    return table_for(g_backend).dot(x, y, n);
}

void axpy(double a, const double* x, double* y, std::size_t n) {
    table_for(g_backend).axpy(a, x, y, n);
}

void scal(double a, double* x, std::size_t n) {
    table_for(g_backend).scal(a, x, n);
}

double sum(const double* x, std::size_t n) {
    return table_for(g_backend).sum(x, n);
}

void rot(double* x, double* y, std::size_t n, double c, double s) {
    table_for(g_backend).rot(x, y, n, c, s);
}

}  // namespace matrixinfo::kernels
