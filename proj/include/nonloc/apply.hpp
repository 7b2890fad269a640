#pragma once

#include <nonloc/plan.hpp>

#include <span>
#include <vector>

namespace nonloc {

/// Grid functions are plain value arrays aligned with the grid nodes and
/// zero at every exterior node; the solvers and checks below keep that
/// invariant.

enum class apply_backend {
    automatic,  ///< vectorized when the cpu supports it, fft for big plans
    scalar,     ///< reference implementation
    avx2,       ///< throws config_error when unavailable
    fft         ///< whole-grid circular-padding pathway
};

bool cpu_has_avx2();

/// Truncated operator at one closure node. Exterior nodes are a programming
/// error, not a configuration one.
double apply_at(const apply_plan& plan, const grid& g, std::span<const double> u,
                int node, apply_backend backend = apply_backend::automatic);

/// Whole-grid apply: closure nodes get the operator value, exterior nodes 0.
void apply_all(const apply_plan& plan, const grid& g, std::span<const double> u,
               std::span<double> out, apply_backend backend = apply_backend::automatic);

/// r = -apply(u) - f on the unknown nodes, 0 outside. Plans that pin the
/// boundary report u itself as the boundary residual.
std::vector<double> residual(const apply_plan& plan, const grid& g,
                             std::span<const double> u, std::span<const double> f,
                             apply_backend backend = apply_backend::automatic);

/// max over the control family (upper) or min (lower) of the linear applies.
double apply_extremal_at(const isaacs_family& fam, const grid& g,
                         std::span<const double> u, int node, bool upper);

/// inf over alpha of sup over beta.
double apply_isaacs_at(const isaacs_family& fam, const grid& g,
                       std::span<const double> u, int node);

namespace detail {
double dot_window_scalar(const double* w, const double* u, int len);
double sym_window_scalar(const double* w, const double* uc, int K, double c0);
#ifdef NONLOC_HAVE_AVX2
double dot_window_avx2(const double* w, const double* u, int len);
double sym_window_avx2(const double* w, const double* uc, int K, double c0);
#endif
} // namespace detail

} // namespace nonloc
