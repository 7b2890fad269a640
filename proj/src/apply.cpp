#include <nonloc/apply.hpp>

#include <nonloc/errors.hpp>
#include <nonloc/fft_conv.hpp>
#include <nonloc/parallel.hpp>

#include <cmath>
#include <limits>

namespace nonloc {

namespace detail {

double dot_window_scalar(const double* w, const double* u, int len) {
    double acc = 0.0;
    for (int k = 0; k < len; ++k) acc += w[k] * u[k];
    return acc;
}

double sym_window_scalar(const double* w, const double* uc, int K, double c0) {
    double acc = c0 * (uc[1] + uc[-1]);
    for (int k = 1; k <= K; ++k) acc += w[k - 1] * (uc[k] + uc[-k]);
    return acc;
}

} // namespace detail

bool cpu_has_avx2() {
#ifdef NONLOC_HAVE_AVX2
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}

namespace {

apply_backend resolve(apply_backend b, const apply_plan& plan, int n_nodes) {
    if (b == apply_backend::automatic) {
        // The direct cost is nodes * window; past a few million multiplies
        // the fft pathway wins.
        const long window = 2L * plan.K + 1;
        if (static_cast<long>(n_nodes) * window > (8L << 20)) return apply_backend::fft;
        return cpu_has_avx2() ? apply_backend::avx2 : apply_backend::scalar;
    }
    if (b == apply_backend::avx2 && !cpu_has_avx2())
        throw config_error("apply: avx2 backend requested but this cpu lacks avx2/fma");
    return b;
}

double apply_at_resolved(const apply_plan& plan, std::span<const double> u, int i,
                         apply_backend backend) {
    const double* uc = u.data() + i;
    if (plan.form == apply_form::first_difference) {
        const int len = 2 * plan.K + 1;
        const double* base = u.data() + (i - plan.K);
        const double dot =
#ifdef NONLOC_HAVE_AVX2
            backend == apply_backend::avx2
                ? detail::dot_window_avx2(plan.w.data(), base, len)
                :
#endif
                detail::dot_window_scalar(plan.w.data(), base, len);
        return dot - plan.diag * u[static_cast<std::size_t>(i)];
    }
    const double sym =
#ifdef NONLOC_HAVE_AVX2
        backend == apply_backend::avx2
            ? detail::sym_window_avx2(plan.w.data(), uc, plan.K, plan.c0)
            :
#endif
            detail::sym_window_scalar(plan.w.data(), uc, plan.K, plan.c0);
    return sym - plan.diag * u[static_cast<std::size_t>(i)];
}

void apply_all_fft(const apply_plan& plan, const grid& g, std::span<const double> u,
                   std::span<double> out) {
    std::vector<double> window;
    if (plan.form == apply_form::first_difference) {
        window = plan.w;
    } else {
        window.assign(static_cast<std::size_t>(2 * plan.K + 1), 0.0);
        for (int k = 1; k <= plan.K; ++k) {
            const double v = plan.w[static_cast<std::size_t>(k - 1)];
            window[static_cast<std::size_t>(plan.K + k)] = v;
            window[static_cast<std::size_t>(plan.K - k)] = v;
        }
        window[static_cast<std::size_t>(plan.K + 1)] += plan.c0;
        window[static_cast<std::size_t>(plan.K - 1)] += plan.c0;
    }
    const std::vector<double> corr = correlate_centered(u, window);
    for (int i = 0; i < g.size(); ++i) {
        out[static_cast<std::size_t>(i)] =
            g.cls(i) == node_class::exterior
                ? 0.0
                : corr[static_cast<std::size_t>(i)] -
                      plan.diag * u[static_cast<std::size_t>(i)];
    }
}

} // namespace

double apply_at(const apply_plan& plan, const grid& g, std::span<const double> u,
                int node, apply_backend backend) {
    if (node < 0 || node >= g.size() || g.cls(node) == node_class::exterior)
        throw internal_error("apply: node is not in the closure of the domain");
    apply_backend b = resolve(backend, plan, 1);
    if (b == apply_backend::fft) b = apply_backend::scalar;
    return apply_at_resolved(plan, u, node, b);
}

void apply_all(const apply_plan& plan, const grid& g, std::span<const double> u,
               std::span<double> out, apply_backend backend) {
    if (static_cast<int>(u.size()) != g.size() || out.size() != u.size())
        throw internal_error("apply: size mismatch between grid and arrays");
    const apply_backend b = resolve(backend, plan, g.size());
    if (b == apply_backend::fft) {
        apply_all_fft(plan, g, u, out);
        return;
    }
    parallel_for(g.size(), [&](int i) {
        out[static_cast<std::size_t>(i)] =
            g.cls(i) == node_class::exterior ? 0.0 : apply_at_resolved(plan, u, i, b);
    });
}

std::vector<double> residual(const apply_plan& plan, const grid& g,
                             std::span<const double> u, std::span<const double> f,
                             apply_backend backend) {
    std::vector<double> r(u.size(), 0.0);
    apply_all(plan, g, u, r, backend);
    for (int i = 0; i < g.size(); ++i) {
        const std::size_t s = static_cast<std::size_t>(i);
        switch (g.cls(i)) {
        case node_class::exterior:
            r[s] = 0.0;
            break;
        case node_class::boundary:
            r[s] = plan.dirichlet_boundary ? u[s] : -r[s] - f[s];
            break;
        case node_class::interior:
            r[s] = -r[s] - f[s];
            break;
        }
    }
    return r;
}

double apply_extremal_at(const isaacs_family& fam, const grid& g,
                         std::span<const double> u, int node, bool upper) {
    double best = upper ? -std::numeric_limits<double>::infinity()
                        : std::numeric_limits<double>::infinity();
    for (const apply_plan& p : fam.plans) {
        const double v = apply_at(p, g, u, node, apply_backend::scalar);
        best = upper ? std::max(best, v) : std::min(best, v);
    }
    return best;
}

double apply_isaacs_at(const isaacs_family& fam, const grid& g,
                       std::span<const double> u, int node) {
    double outer = std::numeric_limits<double>::infinity();
    for (int a = 0; a < fam.n_alpha; ++a) {
        double inner = -std::numeric_limits<double>::infinity();
        for (int b = 0; b < fam.n_beta; ++b)
            inner = std::max(inner,
                             apply_at(fam.plan(a, b), g, u, node, apply_backend::scalar));
        outer = std::min(outer, inner);
    }
    return outer;
}

} // namespace nonloc
