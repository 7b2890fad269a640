#pragma once

#include <nonloc/apply.hpp>

#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

namespace nonloc {

enum class barrier_kind { psi, chi, zeta, eta, w, z };

/// Parameters for the explicit comparison functions. Only the fields of the
/// active kind matter; eval_barrier validates them.
struct barrier_spec {
    barrier_kind kind = barrier_kind::psi;
    double beta = 0.0;     ///< psi exponent, in (0, min{1, 2*sigma})
    double epsilon = 0.0;  ///< kernel scale entering the formulas
    double d0 = std::numeric_limits<double>::infinity();  ///< psi cap distance
    double scale = 1.0;    ///< chi multiplier
    double y = 0.0;        ///< shift magnitude for zeta/eta/w/z
    double beta0 = 0.0;
    double C0 = 0.0;
    double A = 0.0;
    double dbar = 0.0;     ///< certified strip width
    double zeta_exponent = 0.0;  ///< 0 keeps the literal epsilon exponent
    double m_y = 0.0;      ///< m(|y|) entering W
    double m0_y = 0.0;     ///< m0(|y|) entering Z
};

double eval_barrier(const barrier_spec& spec, const domain& dom, double x);

/// The four regions used by the interior-shift barrier, as predicates.
/// Requires |y| <= dbar/8.
class sigma_sets {
public:
    sigma_sets(domain dom, double y, double dbar);

    bool in_sigma1(double x) const;  ///< closure of (Omega - y) union Omega
    bool in_sigma2(double x) const;  ///< Omega intersect (Omega - y)
    bool in_sigma3(double x) const;  ///< sigma1 minus sigma2
    bool in_sigma4(double x) const;  ///< deep cores of Omega and its shift

private:
    domain dom_;
    double y_;
    double dbar_;
};

struct supersolution_report {
    int nodes_tested = 0;
    double min_margin = 0.0;  ///< min over the strip of -apply(barrier) - rhs
    int argmin_node = -1;
    double c_star = std::numeric_limits<double>::quiet_NaN();  ///< psi only
    bool pass = false;        ///< min_margin >= 0
};

/// Evaluates the barrier at the nodes, applies the plan, and compares
/// -apply(barrier) against rhs on every closure node satisfying strip.
supersolution_report
check_supersolution(const barrier_spec& spec, const apply_plan& plan, const grid& g,
                    const std::function<double(double)>& rhs,
                    const std::function<bool(double)>& strip);

/// Thrown when a certification sweep finds no passing parameters; the
/// message carries the best failing value.
struct certification_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct beta0_certificate {
    double beta0 = 0.0;
    double dbar = 0.0;
    double c_star = 0.0;       ///< common constant at the sweep spacing
    double c_star_half = 0.0;  ///< same at h/2
};

/// Grid search over beta in {0.05, 0.10, ...} and strip widths: returns the
/// largest beta, then the widest strip, for which the boundary barrier
/// certifies with one constant across the whole epsilon list, stable under
/// halving h (degradation <= 20%). Spacing rule: h = epsilon/4 per entry.
beta0_certificate fit_beta0(std::span<const kernel_spec> family, const domain& dom);

struct w_certificate {
    double A = 0.0;
    supersolution_report report;
};

/// Doubling search for the shift-barrier amplitude: smallest power-of-two A
/// whose margin against rhs_value is nonnegative on the depth->=|y| core.
w_certificate fit_w_amplitude(barrier_spec w_spec, const apply_plan& plan,
                              const grid& g, double rhs_value,
                              int max_doublings = 48);

} // namespace nonloc
