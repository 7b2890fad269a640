#pragma once

#include <nonloc/solver.hpp>

#include <functional>
#include <span>
#include <string>
#include <vector>

namespace nonloc {

struct comparison_result {
    bool precondition_ok = false;
    std::string note;        ///< which certificate failed, when one does
    bool pass = false;       ///< u <= v on every closure node
    int witness_node = -1;   ///< violating node on failure
    double gap = 0.0;        ///< max over closure nodes of u - v
};

/// Ordering check for a certified (sub, super) pair: recomputes the residual
/// certificates -apply(u) <= f_u, -apply(v) >= f_v and f_u <= f_v, u <= v
/// outside, then asserts u <= v on the closure.
comparison_result comparison_check(const apply_plan& plan, const grid& g,
                                   std::span<const double> u, std::span<const double> v,
                                   std::span<const double> f_u, std::span<const double> f_v,
                                   double cert_tol = 1e-8);

/// (2 sigma)^{-1} * 2 * (diam + 1)^{-2 sigma}, the uniform bound constant.
double linfty_bound_constant(double sigma, const domain& dom);

struct linfty_report {
    double bound = 0.0;   ///< C * ||f||_inf
    double sup_u = 0.0;
    double margin = 0.0;  ///< bound - sup_u, >= 0 on pass
    int argmax_node = -1;
    bool pass = false;
};

linfty_report linfty_bound_check(const grid& g, std::span<const double> u,
                                 double f_sup, double sigma);

struct positivity_report {
    bool skipped = false;  ///< forcing below the positivity threshold
    bool pass = false;
    double min_interior = 0.0;
    std::vector<double> boundary_coarse;  ///< per boundary node, coarse grid
    std::vector<double> boundary_fine;    ///< same nodes on the refined grid
    double worst_ratio_dev = 0.0;         ///< max |fine/coarse - 1|
};

/// Interior positivity plus boundary-value refinement stability (h vs h/2
/// within 25%) for a forcing bounded below by rho0 > 0.
positivity_report boundary_positivity_check(const grid& g_h, std::span<const double> u_h,
                                            const grid& g_h2, std::span<const double> u_h2,
                                            std::span<const double> f_on_h, double rho0);

struct modulus_estimate {
    std::vector<double> t;
    std::vector<double> m;
};

/// Exact discrete modulus sup{|u(x)-u(y)| : |x-y| <= t} over the closure
/// nodes satisfying the restriction; quadratic in the node count.
modulus_estimate modulus_of_continuity(const grid& g, std::span<const double> u,
                                       const std::function<bool(double)>& restriction,
                                       std::span<const double> t_values);

struct envelope_result {
    std::vector<double> t;
    std::vector<double> m;       ///< max over the family per t
    double small_t_ratio = 0.0;  ///< m(t_min) / m(t_max)
};

/// Pointwise max of the per-epsilon moduli; needs >= 3 epsilons spanning a
/// factor >= 4 so the trend is meaningful.
envelope_result equicontinuity_envelope(std::span<const modulus_estimate> members,
                                        std::span<const double> eps_list);

struct labeled_solution {
    const grid* g = nullptr;
    std::span<const double> u;
    double eps = 0.0;
};

struct jump_sample {
    double eps;
    double d;
    double absu;
};

struct jump_fit_result {
    bool degenerate = false;
    double C0 = 0.0;
    double beta0 = 0.0;
    double residual = 0.0;  ///< cross-epsilon tightness spread at beta0
    std::vector<jump_sample> data;
    std::vector<std::pair<double, double>> scan;  ///< (beta, spread)
};

/// One majorant |u_eps| <= C0 (eps + d)^{beta0} fitted across the family on
/// the strip d <= d0. Beta comes from the fixed grid {0.05,...,0.95}: the
/// largest exponent whose per-epsilon tightness constants agree within the
/// threshold; C0 is then the smallest majorizing constant.
jump_fit_result boundary_jump_fit(std::span<const labeled_solution> sols,
                                  double strip_d0, double spread_threshold = 0.05);

struct csigma_calibration {
    double c_sigma = 0.0;  ///< Richardson value 2 c(h/2) - c(h)
    double c_h = 0.0;
    double c_h2 = 0.0;
};

/// Normalization for the fractional reference profile (1 - x^2)^sigma on
/// (-1,1), calibrated against this library's own singular-kernel plan.
csigma_calibration calibrate_c_sigma(double sigma, double h = 1e-3);

/// Exact-mode reference c_sigma (1 - x^2)_+^sigma at the grid nodes.
std::vector<double> fractional_reference_exact(const grid& g, double sigma,
                                               double c_sigma);

/// Numeric mode: direct solve of the singular-kernel problem with f == 1.
std::vector<double> fractional_reference_numeric(const grid& g, double sigma);

struct rate_fit {
    std::vector<double> eps;
    std::vector<double> errors;           ///< sup over closure nodes
    std::vector<double> interior_errors;  ///< sup over d >= interior_delta
    double gamma0 = 0.0;                  ///< log-log slope
    double C = 0.0;                       ///< log-log prefactor
    bool monotone = false;                ///< strictly decreasing errors
    bool flagged = false;                 ///< non-monotone beyond factor 1.5
    double c_sigma = 0.0;
};

/// Errors against the calibrated fractional reference along the epsilon
/// sweep with h = eps/4, plus the fitted rate.
rate_fit convergence_study(double sigma, std::span<const double> eps_list,
                           const domain& dom, double interior_delta = 0.25);

struct counterexample_report {
    std::vector<double> eps;
    std::vector<double> interior_err;    ///< sup over d >= delta of |u_eps - u0|
    std::vector<double> global_err;      ///< sup over the closure
    std::vector<double> collar_modulus;  ///< modulus at t = 4h on the 4h collar
    std::vector<double> u0_boundary;     ///< u0 at the boundary node, per grid
    bool u0_boundary_positive = false;
    double interior_decrease = 0.0;      ///< first/last interior error
    double min_global_over_jump = 0.0;   ///< min global_err / u0(boundary)
};

/// Zero-order limit problem with kernel J against the regularized singular
/// family: interior agreement improves with eps while the global distance
/// stays pinned to the boundary jump of u0.
counterexample_report counterexample_study(const radial_table& base_j, double alpha,
                                           std::span<const double> eps_list,
                                           const domain& dom, double f_const = 1.0,
                                           double interior_delta = 0.25);

} // namespace nonloc
