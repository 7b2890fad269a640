#pragma once

#include <nonloc/grid.hpp>
#include <nonloc/kernel.hpp>

#include <optional>
#include <vector>

namespace nonloc {

enum class apply_form { first_difference, second_difference };

/// Precomputed discretization of one nonlocal operator on one grid:
/// per-cell kernel masses out to the pad radius, the exact mass beyond it,
/// and the cached coefficient of u_i in -apply(u)_i.
///
/// Everything outside the pad contributes only through tail * u_i, which is
/// exact because grid functions vanish there; truncation introduces no error.
struct apply_plan {
    apply_form form = apply_form::first_difference;
    kernel_spec spec;
    int K = 0;                ///< number of cells per side (= grid pad_cells)
    double h = 0.0;
    std::vector<double> w;    ///< first: 2K+1 centered; second: K entries, k = 1..K
    double c0 = 0.0;          ///< origin-cell second-difference coefficient (already / h^2)
    double l1 = 0.0;          ///< +inf for the non-integrable families
    double weight_sum = 0.0;  ///< sum of all stored cell masses (both sides)
    double tail = 0.0;        ///< two-sided mass beyond the outermost cell edge
    double diag = 0.0;        ///< u_i coefficient: apply(u)_i = (neighbor terms) - diag*u_i
    bool dirichlet_boundary = false;  ///< singular families: boundary nodes pinned to 0

    double truncation_radius() const { return (K + 0.5) * h; }
};

/// Per-cell masses w_k = integral of the density over [kh-h/2, kh+h/2],
/// k = -K..K, Gauss-Legendre (16-point) per smooth piece with one extra
/// bisection for cells overlapping |z| < eps. The origin entry is 0 for the
/// non-integrable families (their origin cell is handled by the second-moment
/// correction, see origin_cell_moment).
std::vector<double> cell_weights(const kernel_spec& spec, double h, int K);

/// Second moment of the origin cell, M0 = integral of z^2 * density over
/// [0, h/2]; closed form for the pure fractional kernel, quadrature otherwise.
double origin_cell_moment(const kernel_spec& spec, double h);

/// Builds the plan for a kernel on a grid. The form defaults to
/// first_difference for integrable kernels and second_difference for the
/// singular families (which cannot use first differences).
apply_plan build_plan(const kernel_spec& spec, const grid& g,
                      std::optional<apply_form> form = std::nullopt);

/// Two-indexed family of plans sharing one grid, one truncation and one form,
/// for the inf-sup (Isaacs) operator and its extremal envelopes.
struct isaacs_family {
    int n_alpha = 0;
    int n_beta = 0;
    std::vector<apply_plan> plans;  ///< row-major: alpha * n_beta + beta
    double lambda1 = 1.0;
    double lambda2 = 1.0;

    const apply_plan& plan(int a, int b) const { return plans[a * n_beta + b]; }
};

isaacs_family build_isaacs_family(const std::vector<std::vector<kernel_spec>>& specs,
                                  const grid& g);

} // namespace nonloc
