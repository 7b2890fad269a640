#pragma once

#include <nonloc/apply.hpp>

#include <functional>
#include <span>
#include <utility>
#include <vector>

namespace nonloc {

struct picard_config {
    double a = 0.0;      ///< step weight; 0 selects 0.9 * min{1/nu0, 1/l1}
    double nu0 = 0.0;    ///< contraction mass; 0 means compute it here
    double tol = 1e-9;   ///< sup-norm residual target
    int max_iter = 200000;
    apply_backend backend = apply_backend::automatic;
};

struct solve_report {
    bool converged = false;
    int iterations = 0;          ///< update steps taken
    double final_residual = 0.0;
    double a = 0.0;
    double nu0 = 0.0;
    double theoretical_factor = 0.0;  ///< 1 - a * nu0 (Isaacs: 1 - a*lambda1*nu0)
    double measured_factor = 0.0;     ///< geometric mean of all increment ratios
    double asymptotic_factor = 0.0;   ///< same, over the last min(20, ceil(iters/2))
    double wall_seconds = 0.0;
    std::vector<double> residual_history;  ///< sup-norm residual at each evaluation
};

/// One damped fixed-point update u - a * r(u); exposed for the step tests.
std::vector<double> picard_step(const apply_plan& plan, const grid& g,
                                std::span<const double> u, std::span<const double> f,
                                double a,
                                apply_backend backend = apply_backend::automatic);

/// Damped Picard iteration for the integrable families. The default weight
/// keeps the iteration monotone and contracting with factor 1 - a*nu0.
std::pair<std::vector<double>, solve_report>
solve_picard(const apply_plan& plan, const grid& g, std::span<const double> f,
             picard_config cfg = {});

/// Sparse-free dense Cholesky solve of -apply(u) = f over the unknown nodes.
/// Performs one step of iterative refinement and verifies the relative
/// residual to 1e-10.
std::vector<double> solve_direct(const apply_plan& plan, const grid& g,
                                 std::span<const double> f);

/// Damped iteration on the inf-sup operator. The default weight uses the
/// ellipticity bounds of the family and the unweighted base kernel.
std::pair<std::vector<double>, solve_report>
solve_isaacs(const isaacs_family& fam, const grid& g, std::span<const double> f,
             picard_config cfg = {});

enum class time_scheme { implicit_euler, explicit_euler };

struct parabolic_config {
    double dt = 0.0;
    double t_final = 0.0;
    time_scheme scheme = time_scheme::implicit_euler;
};

struct parabolic_result {
    std::vector<double> times;                ///< t_0 = 0 through t_final
    std::vector<std::vector<double>> states;  ///< full-grid state per time
};

/// Implicit or explicit Euler for u_t = apply(u) + f(t). dt must divide
/// t_final; the explicit scheme additionally needs dt * (l1 + tail) <= 1.
parabolic_result
solve_parabolic(const apply_plan& plan, const grid& g, std::span<const double> u0,
                const std::function<void(double, std::span<double>)>& rhs,
                const parabolic_config& cfg);

/// Constant-forcing convenience wrapper.
parabolic_result
solve_parabolic(const apply_plan& plan, const grid& g, std::span<const double> u0,
                std::span<const double> f, const parabolic_config& cfg);

} // namespace nonloc
