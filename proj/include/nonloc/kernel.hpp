#pragma once

#include <nonloc/domain.hpp>

#include <vector>

namespace nonloc {

enum class kernel_family {
    zero_order,            ///< K_eps(z) = 1/(eps^{1+2s} + |z|^{1+2s})
    general_j,             ///< tabulated integrable radial profile J
    singular_fractional,   ///< |z|^{-(1+2s)}, the fractional-Laplacian kernel
    regularized_singular,  ///< min{1,|z/eps|^a}^{-1} J(z), non-integrable at 0
    anisotropic            ///< a(z) K_eps(z) with 0 < l1 <= a <= l2
};

/// Radial profile sampled at increasing radii, linearly interpolated.
/// Densities are zero beyond the last radius; coefficient profiles instead
/// hold their last value so the ellipticity bounds stay valid on all of R.
struct radial_table {
    std::vector<double> r;
    std::vector<double> v;

    bool empty() const { return r.empty(); }
    double support() const { return r.empty() ? 0.0 : r.back(); }
    double interp(double radius, bool clamp_beyond) const;
};

struct kernel_spec {
    kernel_family family = kernel_family::zero_order;
    double sigma = 0.5;
    double epsilon = 1.0;
    int dim = 1;
    double alpha = 1.5;        ///< regularized_singular singularity exponent, in (1,2)
    radial_table base_density; ///< J for general_j / regularized_singular
    radial_table coefficient;  ///< a(z) for anisotropic (empty means a == 1)
    double lambda1 = 1.0;
    double lambda2 = 1.0;
};

/// Throws config_error when the parameter combination is outside the
/// supported ranges (sigma in (0,1), epsilon > 0 except the pure fractional
/// case, alpha in (1,2), table sanity, ellipticity bounds).
void validate(const kernel_spec& spec);

bool is_integrable(const kernel_spec& spec);

/// Density value; throws for z == 0 on the non-integrable families.
double eval_kernel(const kernel_spec& spec, double z);

/// Sorted positive radii where the density formula loses smoothness
/// (epsilon, profile kinks). Quadrature ranges are split there.
std::vector<double> density_breakpoints(const kernel_spec& spec);

/// Radius beyond which the density vanishes, +inf for algebraic tails.
double support_radius(const kernel_spec& spec);

/// Integral of the density over a positive one-sided range [a, b],
/// 0 <= a < b, split at the profile kinks; relative tolerance 1e-10.
double integrate_density(const kernel_spec& spec, double a, double b);

/// L1 norm of the density; +infinity for the non-integrable families.
double l1_norm(const kernel_spec& spec);

/// Mass beyond radius R (both sides), via the 1/z substitution for the
/// far field of the algebraic tails.
double tail_mass(const kernel_spec& spec, double R);

/// Integral of z^2 * density over |z| < 1 (finite for every family).
double second_moment_near_zero(const kernel_spec& spec);

struct kernel_moments {
    double l1;            ///< +infinity marker for singular families
    double m2_near_zero;
};
kernel_moments moments(const kernel_spec& spec);

/// inf over x in the closure of Omega of the kernel mass seen outside Omega.
/// Deterministic sampling: 4097 uniform points per interval plus the
/// endpoints.
double nu0_lower_bound(const kernel_spec& spec, const domain& dom);

} // namespace nonloc
