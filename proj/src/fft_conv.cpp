#include <nonloc/fft_conv.hpp>

#include <nonloc/errors.hpp>

#include <fftw3.h>

#include <cstring>
#include <mutex>

namespace nonloc {

namespace {
// The FFTW planner mutates global state; serialize plan creation.
std::mutex planner_mutex;
} // namespace

std::vector<double> correlate_centered(std::span<const double> u,
                                       std::span<const double> w_centered) {
    const int n = static_cast<int>(u.size());
    const int m = static_cast<int>(w_centered.size());
    if (m % 2 == 0) throw internal_error("fft: window length must be odd");
    const int K = (m - 1) / 2;
    if (n == 0) return {};

    const int L = n + m;  // >= n + m - 1, no circular wraparound
    const int Lc = L / 2 + 1;

    double* a = fftw_alloc_real(static_cast<std::size_t>(L));
    double* b = fftw_alloc_real(static_cast<std::size_t>(L));
    fftw_complex* fa = fftw_alloc_complex(static_cast<std::size_t>(Lc));
    fftw_complex* fb = fftw_alloc_complex(static_cast<std::size_t>(Lc));

    std::memset(a, 0, sizeof(double) * static_cast<std::size_t>(L));
    std::memset(b, 0, sizeof(double) * static_cast<std::size_t>(L));
    std::memcpy(a, u.data(), sizeof(double) * static_cast<std::size_t>(n));
    for (int t = 0; t < m; ++t) b[t] = w_centered[static_cast<std::size_t>(m - 1 - t)];

    fftw_plan pf_a, pf_b, pb;
    {
        std::lock_guard<std::mutex> lock(planner_mutex);
        pf_a = fftw_plan_dft_r2c_1d(L, a, fa, FFTW_ESTIMATE);
        pf_b = fftw_plan_dft_r2c_1d(L, b, fb, FFTW_ESTIMATE);
        pb = fftw_plan_dft_c2r_1d(L, fa, a, FFTW_ESTIMATE);
    }
    fftw_execute(pf_a);
    fftw_execute(pf_b);
    for (int i = 0; i < Lc; ++i) {
        const double re = fa[i][0] * fb[i][0] - fa[i][1] * fb[i][1];
        const double im = fa[i][0] * fb[i][1] + fa[i][1] * fb[i][0];
        fa[i][0] = re;
        fa[i][1] = im;
    }
    fftw_execute(pb);

    std::vector<double> out(static_cast<std::size_t>(n));
    const double scale = 1.0 / L;
    // conv[j] = sum_t u[t] * rev(w)[j - t] = sum_k w[k] u[j - 2K + k], so the
    // centered correlation at node i sits at j = i + K.
    for (int i = 0; i < n; ++i)
        out[static_cast<std::size_t>(i)] = a[i + K] * scale;

    {
        std::lock_guard<std::mutex> lock(planner_mutex);
        fftw_destroy_plan(pf_a);
        fftw_destroy_plan(pf_b);
        fftw_destroy_plan(pb);
    }
    fftw_free(a);
    fftw_free(b);
    fftw_free(fa);
    fftw_free(fb);
    return out;
}

} // namespace nonloc
