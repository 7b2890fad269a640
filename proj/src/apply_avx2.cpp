// Vectorized apply windows. This translation unit is the only one compiled
// with -mavx2 -mfma; callers gate on cpu_has_avx2() at runtime.

#include <nonloc/apply.hpp>

#include <immintrin.h>

namespace nonloc::detail {

double dot_window_avx2(const double* w, const double* u, int len) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    int k = 0;
    for (; k + 8 <= len; k += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(w + k), _mm256_loadu_pd(u + k), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(w + k + 4), _mm256_loadu_pd(u + k + 4), acc1);
    }
    for (; k + 4 <= len; k += 4)
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(w + k), _mm256_loadu_pd(u + k), acc0);
    const __m256d acc = _mm256_add_pd(acc0, acc1);
    double buf[4];
    _mm256_storeu_pd(buf, acc);
    double total = (buf[0] + buf[1]) + (buf[2] + buf[3]);
    for (; k < len; ++k) total += w[k] * u[k];
    return total;
}

double sym_window_avx2(const double* w, const double* uc, int K, double c0) {
    __m256d acc = _mm256_setzero_pd();
    int k = 1;
    for (; k + 3 <= K; k += 4) {
        const __m256d wf = _mm256_loadu_pd(w + (k - 1));
        const __m256d up = _mm256_loadu_pd(uc + k);
        // Mirror side loaded ascending then lane-reversed so uc[k+j] pairs
        // with uc[-k-j].
        __m256d um = _mm256_loadu_pd(uc - k - 3);
        um = _mm256_permute4x64_pd(um, 0x1B);
        acc = _mm256_fmadd_pd(wf, _mm256_add_pd(up, um), acc);
    }
    double buf[4];
    _mm256_storeu_pd(buf, acc);
    double total = (buf[0] + buf[1]) + (buf[2] + buf[3]);
    for (; k <= K; ++k) total += w[k - 1] * (uc[k] + uc[-k]);
    return total + c0 * (uc[1] + uc[-1]);
}

} // namespace nonloc::detail
