#include <nonloc/solver.hpp>

#include <nonloc/errors.hpp>

#include <Eigen/Dense>

#include <chrono>
#include <cmath>
#include <limits>

namespace nonloc {
namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double sup_norm(std::span<const double> v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

/// Unknown node list: the closure nodes, minus the boundary when the plan
/// pins it to zero.
std::vector<int> unknown_nodes(const apply_plan& plan, const grid& g) {
    std::vector<int> nodes;
    for (int i : g.omega_bar())
        if (!(plan.dirichlet_boundary && g.cls(i) == node_class::boundary))
            nodes.push_back(i);
    return nodes;
}

/// Coupling weight toward offset k != 0 and the effective diagonal of
/// -apply, i.e. -apply(u)_i = diag_eff * u_i - sum_k coupling(k) u_{i+k}.
double coupling(const apply_plan& plan, int k) {
    const int a = std::abs(k);
    if (plan.form == apply_form::first_difference)
        return plan.w[static_cast<std::size_t>(plan.K + k)];
    double v = plan.w[static_cast<std::size_t>(a - 1)];
    if (a == 1) v += plan.c0;
    return v;
}

double effective_diag(const apply_plan& plan) {
    if (plan.form == apply_form::first_difference)
        return plan.diag - plan.w[static_cast<std::size_t>(plan.K)];
    return plan.diag;
}

struct assembled_system {
    Eigen::MatrixXd A;
    std::vector<int> nodes;          ///< unknown node per matrix row
    std::vector<int> col_of;         ///< grid node -> matrix column, -1 outside
};

assembled_system assemble(const apply_plan& plan, const grid& g) {
    assembled_system sys;
    sys.nodes = unknown_nodes(plan, g);
    const int m = static_cast<int>(sys.nodes.size());
    sys.col_of.assign(static_cast<std::size_t>(g.size()), -1);
    for (int r = 0; r < m; ++r) sys.col_of[static_cast<std::size_t>(sys.nodes[r])] = r;

    sys.A = Eigen::MatrixXd::Zero(m, m);
    const double dia = effective_diag(plan);
    for (int r = 0; r < m; ++r) {
        const int i = sys.nodes[static_cast<std::size_t>(r)];
        sys.A(r, r) = dia;
        for (int k = -plan.K; k <= plan.K; ++k) {
            if (k == 0) continue;
            const int c = sys.col_of[static_cast<std::size_t>(i + k)];
            if (c >= 0) sys.A(r, c) -= coupling(plan, k);
        }
    }
    return sys;
}

std::vector<double> scatter(const assembled_system& sys, const Eigen::VectorXd& x, int n) {
    std::vector<double> u(static_cast<std::size_t>(n), 0.0);
    for (std::size_t r = 0; r < sys.nodes.size(); ++r)
        u[static_cast<std::size_t>(sys.nodes[r])] = x(static_cast<Eigen::Index>(r));
    return u;
}

struct factor_cache {
    assembled_system sys;
    Eigen::LLT<Eigen::MatrixXd> llt;
};

factor_cache factorize(const apply_plan& plan, const grid& g, const Eigen::MatrixXd* shift) {
    factor_cache fc{assemble(plan, g), {}};
    if (shift) fc.sys.A += *shift;
    fc.llt.compute(fc.sys.A);
    if (fc.llt.info() != Eigen::Success)
        throw internal_error("solver: Cholesky factorization failed; the "
                             "discrete operator lost positive definiteness");
    return fc;
}

/// Shared convergence bookkeeping for the damped iterations.
solve_report finish_report(std::vector<double> history, int iterations, double a,
                           double nu0, double theo, bool converged, double seconds) {
    solve_report rep;
    rep.converged = converged;
    rep.iterations = iterations;
    rep.final_residual = history.empty() ? 0.0 : history.back();
    rep.a = a;
    rep.nu0 = nu0;
    rep.theoretical_factor = theo;
    rep.wall_seconds = seconds;
    const std::size_t m = history.size();
    if (m >= 2 && history.front() > 0.0 && history[m - 2] > 0.0) {
        const double last = std::max(history.back(), 1e-300);
        rep.measured_factor =
            std::pow(last / history.front(), 1.0 / static_cast<double>(m - 1));
        const int k = std::min<int>(20, (iterations + 1) / 2);
        if (k >= 1 && m >= static_cast<std::size_t>(k) + 1) {
            const double base = history[m - 1 - static_cast<std::size_t>(k)];
            if (base > 0.0)
                rep.asymptotic_factor = std::pow(last / base, 1.0 / k);
        }
    }
    rep.residual_history = std::move(history);
    return rep;
}

} // namespace

std::vector<double> picard_step(const apply_plan& plan, const grid& g,
                                std::span<const double> u, std::span<const double> f,
                                double a, apply_backend backend) {
    const std::vector<double> r = residual(plan, g, u, f, backend);
    std::vector<double> next(u.begin(), u.end());
    for (int i : g.omega_bar())
        next[static_cast<std::size_t>(i)] -= a * r[static_cast<std::size_t>(i)];
    return next;
}

std::pair<std::vector<double>, solve_report>
solve_picard(const apply_plan& plan, const grid& g, std::span<const double> f,
             picard_config cfg) {
    if (!is_integrable(plan.spec))
        throw config_error("solver: the damped iteration needs an integrable "
                           "kernel; use the direct solver for singular families");
    const auto t0 = std::chrono::steady_clock::now();
    const double nu0 = cfg.nu0 > 0.0 ? cfg.nu0 : nu0_lower_bound(plan.spec, g.dom());
    double a = cfg.a;
    if (a <= 0.0) a = 0.9 * std::min(1.0 / nu0, 1.0 / plan.l1);
    if (!(a > 0.0) || a * plan.l1 > 1.0 + 1e-12)
        throw config_error("solver: step weight must satisfy 0 < a <= 1/l1");

    std::vector<double> u(f.size(), 0.0);
    std::vector<double> history;
    int iters = 0;
    bool converged = false;
    while (true) {
        const std::vector<double> r = residual(plan, g, u, f, cfg.backend);
        const double res = sup_norm(r);
        history.push_back(res);
        if (res <= cfg.tol) {
            converged = true;
            break;
        }
        if (iters >= cfg.max_iter) break;
        for (int i : g.omega_bar())
            u[static_cast<std::size_t>(i)] -= a * r[static_cast<std::size_t>(i)];
        ++iters;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(u),
            finish_report(std::move(history), iters, a, nu0, 1.0 - a * nu0, converged, secs)};
}

std::vector<double> solve_direct(const apply_plan& plan, const grid& g,
                                 std::span<const double> f) {
    if (static_cast<int>(f.size()) != g.size())
        throw internal_error("solver: rhs size does not match the grid");
    factor_cache fc = factorize(plan, g, nullptr);
    const int m = static_cast<int>(fc.sys.nodes.size());
    Eigen::VectorXd b(m);
    for (int r = 0; r < m; ++r)
        b(r) = f[static_cast<std::size_t>(fc.sys.nodes[static_cast<std::size_t>(r)])];

    Eigen::VectorXd x = fc.llt.solve(b);
    x += fc.llt.solve(b - fc.sys.A * x);

    const double bn = b.lpNorm<Eigen::Infinity>();
    const double rn = (b - fc.sys.A * x).lpNorm<Eigen::Infinity>();
    if (bn > 0.0 && rn > 1e-10 * bn)
        throw internal_error("solver: direct solve residual exceeded 1e-10");
    return scatter(fc.sys, x, g.size());
}

std::pair<std::vector<double>, solve_report>
solve_isaacs(const isaacs_family& fam, const grid& g, std::span<const double> f,
             picard_config cfg) {
    const auto t0 = std::chrono::steady_clock::now();
    // Weight from the unweighted base kernel and the ellipticity bounds.
    kernel_spec base = fam.plans.front().spec;
    base.family = kernel_family::zero_order;
    base.coefficient = {};
    base.lambda1 = base.lambda2 = 1.0;
    const double l1b = l1_norm(base);
    const double nu0b = cfg.nu0 > 0.0 ? cfg.nu0 : nu0_lower_bound(base, g.dom());
    double a = cfg.a;
    if (a <= 0.0) a = 0.9 * std::min(1.0 / (fam.lambda2 * l1b), 1.0 / (fam.lambda1 * nu0b));
    if (!(a > 0.0) || a * fam.lambda2 * l1b > 1.0 + 1e-12)
        throw config_error("solver: Isaacs step weight must satisfy 0 < a <= 1/(lambda2 l1)");

    const int n = g.size();
    std::vector<double> u(static_cast<std::size_t>(n), 0.0);
    std::vector<double> r(static_cast<std::size_t>(n), 0.0);
    std::vector<double> history;
    int iters = 0;
    bool converged = false;
    while (true) {
        for (int i : g.omega_bar())
            r[static_cast<std::size_t>(i)] =
                -apply_isaacs_at(fam, g, u, i) - f[static_cast<std::size_t>(i)];
        const double res = sup_norm(r);
        history.push_back(res);
        if (res <= cfg.tol) {
            converged = true;
            break;
        }
        if (iters >= cfg.max_iter) break;
        for (int i : g.omega_bar())
            u[static_cast<std::size_t>(i)] -= a * r[static_cast<std::size_t>(i)];
        ++iters;
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return {std::move(u), finish_report(std::move(history), iters, a, nu0b,
                                        1.0 - a * fam.lambda1 * nu0b, converged, secs)};
}

parabolic_result
solve_parabolic(const apply_plan& plan, const grid& g, std::span<const double> u0,
                const std::function<void(double, std::span<double>)>& rhs,
                const parabolic_config& cfg) {
    if (!(cfg.dt > 0.0) || !(cfg.t_final > 0.0))
        throw config_error("parabolic: dt and t_final must be positive");
    const double steps_real = cfg.t_final / cfg.dt;
    const int steps = static_cast<int>(std::llround(steps_real));
    if (steps < 1 || std::abs(steps_real - steps) > 1e-9 * steps_real)
        throw config_error("parabolic: dt must divide t_final");
    if (cfg.scheme == time_scheme::explicit_euler) {
        if (plan.l1 == inf)
            throw config_error("parabolic: the explicit scheme is unstable for "
                               "non-integrable kernels; use implicit Euler");
        if (cfg.dt * (plan.l1 + plan.tail) > 1.0 + 1e-12)
            throw config_error("parabolic: explicit stability needs dt*(l1+tail) <= 1");
    }

    const int n = g.size();
    parabolic_result out;
    out.times.reserve(static_cast<std::size_t>(steps) + 1);
    out.states.reserve(static_cast<std::size_t>(steps) + 1);
    std::vector<double> u(u0.begin(), u0.end());
    out.times.push_back(0.0);
    out.states.push_back(u);

    std::vector<double> f(static_cast<std::size_t>(n), 0.0);

    if (cfg.scheme == time_scheme::explicit_euler) {
        std::vector<double> au(static_cast<std::size_t>(n), 0.0);
        for (int mstep = 1; mstep <= steps; ++mstep) {
            const double t_prev = cfg.dt * (mstep - 1);
            rhs(t_prev, f);
            apply_all(plan, g, u, au);
            for (int i : g.omega_bar()) {
                const std::size_t s = static_cast<std::size_t>(i);
                u[s] += cfg.dt * (au[s] + f[s]);
            }
            out.times.push_back(cfg.dt * mstep);
            out.states.push_back(u);
        }
        return out;
    }

    // Implicit Euler: factor (I/dt + A) once, A the matrix of -apply.
    factor_cache fc = factorize(plan, g, nullptr);
    const int m = static_cast<int>(fc.sys.nodes.size());
    fc.sys.A += Eigen::MatrixXd::Identity(m, m) / cfg.dt;
    fc.llt.compute(fc.sys.A);
    if (fc.llt.info() != Eigen::Success)
        throw internal_error("parabolic: time-step factorization failed");

    Eigen::VectorXd b(m);
    for (int mstep = 1; mstep <= steps; ++mstep) {
        const double t_next = cfg.dt * mstep;
        rhs(t_next, f);
        for (int r = 0; r < m; ++r) {
            const std::size_t i =
                static_cast<std::size_t>(fc.sys.nodes[static_cast<std::size_t>(r)]);
            b(r) = u[i] / cfg.dt + f[i];
        }
        const Eigen::VectorXd x = fc.llt.solve(b);
        u = scatter(fc.sys, x, n);
        out.times.push_back(t_next);
        out.states.push_back(u);
    }
    return out;
}

parabolic_result
solve_parabolic(const apply_plan& plan, const grid& g, std::span<const double> u0,
                std::span<const double> f, const parabolic_config& cfg) {
    std::vector<double> fc(f.begin(), f.end());
    return solve_parabolic(
        plan, g, u0,
        [&fc](double, std::span<double> out) {
            std::copy(fc.begin(), fc.end(), out.begin());
        },
        cfg);
}

} // namespace nonloc
