#include "kernels_impl.hpp"

#if defined(__aarch64__)

#include <arm_neon.h>

namespace matrixinfo::kernels::detail {

bool neon_compiled() { return true; }

double neon_dot(const double* x, const double* y, std::size_t n) {
    float64x2_t acc0 = vdupq_n_f64(0.0);
    float64x2_t acc1 = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        acc0 = vfmaq_f64(acc0, vld1q_f64(x + i), vld1q_f64(y + i));
        acc1 = vfmaq_f64(acc1, vld1q_f64(x + i + 2), vld1q_f64(y + i + 2));
    }
    double acc = vaddvq_f64(acc0) + vaddvq_f64(acc1);
    for (; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

void neon_axpy(double a, const double* x, double* y, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void neon_scal(double a, double* x, std::size_t n) {
    const float64x2_t va = vdupq_n_f64(a);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        vst1q_f64(x + i, vmulq_f64(va, vld1q_f64(x + i)));
    }
    for (; i < n; ++i) x[i] *= a;
}

double neon_sum(const double* x, std::size_t n) {
    float64x2_t acc = vdupq_n_f64(0.0);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(x + i));
    double s = vaddvq_f64(acc);
    for (; i < n; ++i) s += x[i];
    return s;
}

void neon_rot(double* x, double* y, std::size_t n, double c, double s) {
    const float64x2_t vc = vdupq_n_f64(c);
    const float64x2_t vs = vdupq_n_f64(s);
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const float64x2_t vx = vld1q_f64(x + i);
        const float64x2_t vy = vld1q_f64(y + i);
        vst1q_f64(x + i, vfmsq_f64(vmulq_f64(vc, vx), vs, vy));
        vst1q_f64(y + i, vfmaq_f64(vmulq_f64(vc, vy), vs, vx));
    }
    for (; i < n; ++i) {
        const double xi = x[i];
        const double yi = y[i];
        x[i] = c * xi - s * yi;
        y[i] = s * xi + c * yi;
    }
}

}  // namespace matrixinfo::kernels::detail

#else

namespace matrixinfo::kernels::detail {

bool neon_compiled() { return false; }

double neon_dot(const double* x, const double* y, std::size_t n) {
    return scalar_dot(x, y, n);
}
void neon_axpy(double a, const double* x, double* y, std::size_t n) {
    scalar_axpy(a, x, y, n);
}
void neon_scal(double a, double* x, std::size_t n) { scalar_scal(a, x, n); }
double neon_sum(const double* x, std::size_t n) { return scalar_sum(x, n); }
void neon_rot(double* x, double* y, std::size_t n, double c, double s) {
    scalar_rot(x, y, n, c, s);
}

}  // namespace matrixinfo::kernels::detail

#endif  // __aarch64__
