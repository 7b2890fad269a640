#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <nonloc/errors.hpp>
#include <nonloc/solver.hpp>

#include <cmath>
#include <vector>

using namespace nonloc;

namespace {

kernel_spec zero_order(double eps) {
    kernel_spec ks;
    ks.family = kernel_family::zero_order;
    ks.sigma = 0.5;
    ks.epsilon = eps;
    return ks;
}

kernel_spec fractional_half() {
    kernel_spec ks;
    ks.family = kernel_family::singular_fractional;
    ks.sigma = 0.5;
    ks.epsilon = 0.0;
    return ks;
}

std::vector<double> ones(const grid& g) {
    return std::vector<double>(static_cast<std::size_t>(g.size()), 1.0);
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

} // namespace

TEST_CASE("three-node problem solves the hand-assembled system") {
    // Omega = (-0.1, 0.1) with h = 0.1: closure nodes -0.1, 0, 0.1 and no
    // pinning for the bounded kernel. Row i: (diag - w0) u_i - sum_{k != 0}
    // w_k u_{i+k} = f_i with only the three closure nodes contributing.
    const grid g = grid::build(domain({{-0.1, 0.1}}), 0.1, 0.2);
    const apply_plan plan = build_plan(zero_order(0.4), g, apply_form::first_difference);
    const std::vector<double> u = solve_direct(plan, g, ones(g));

    const double dia = plan.diag - plan.w[static_cast<std::size_t>(plan.K)];
    const double w1 = plan.w[static_cast<std::size_t>(plan.K + 1)];
    const double w2 = plan.w[static_cast<std::size_t>(plan.K + 2)];
    // Symmetry forces u(-0.1) = u(0.1); reduce to a 2x2 system in
    // (u_boundary, u_center) and solve by Cramer's rule.
    const double a11 = dia - w2, a12 = -w1;
    const double a21 = -2.0 * w1, a22 = dia;
    const double det = a11 * a22 - a12 * a21;
    const double ub = (a22 - a12) / det;
    const double uc = (a11 - a21) / det;

    const int ib = g.index_of(-0.1), ic = g.index_of(0.0);
    CHECK(u[static_cast<std::size_t>(ib)] == doctest::Approx(ub).epsilon(1e-10));
    CHECK(u[static_cast<std::size_t>(ic)] == doctest::Approx(uc).epsilon(1e-10));
    CHECK(u[static_cast<std::size_t>(g.index_of(0.1))] ==
          doctest::Approx(ub).epsilon(1e-10));
}

TEST_CASE("picard converges with the advertised contraction data") {
    const grid g = grid::build(domain({{-1.0, 1.0}}), 0.05, 2.0);
    const apply_plan plan = build_plan(zero_order(0.2), g);
    auto [u, rep] = solve_picard(plan, g, ones(g));

    CHECK(rep.converged);
    CHECK(rep.final_residual <= 1e-9);
    // Exterior mass from the center: pi/eps - 2*arctan(1/eps)/eps.
    CHECK(rep.nu0 == doctest::Approx(1.9739555985).epsilon(2e-7));
    // l1 > nu0 here, so a = 0.9/l1 = 0.9*eps/pi.
    CHECK(rep.a == doctest::Approx(0.9 * 0.2 / 3.14159265358979).epsilon(1e-9));
    CHECK(rep.theoretical_factor == doctest::Approx(1.0 - rep.a * rep.nu0));
    CHECK(rep.asymptotic_factor < rep.theoretical_factor);
    CHECK(rep.asymptotic_factor > 0.5);
    CHECK(static_cast<int>(rep.residual_history.size()) == rep.iterations + 1);

    // Residual history decays monotonically after the first step.
    for (std::size_t k = 2; k < rep.residual_history.size(); ++k)
        CHECK(rep.residual_history[k] < rep.residual_history[k - 1]);
}

TEST_CASE("picard and direct solves agree") {
    const grid g = grid::build(domain({{-1.0, 1.0}}), 0.05, 2.0);
    const apply_plan plan = build_plan(zero_order(0.2), g);
    auto [u_pic, rep] = solve_picard(plan, g, ones(g));
    const std::vector<double> u_dir = solve_direct(plan, g, ones(g));
    CHECK(rep.converged);
    CHECK(max_abs_diff(u_pic, u_dir) < 1e-7);
}

TEST_CASE("direct solve leaves a tiny residual and respects positivity") {
    const grid g = grid::build(domain({{-1.0, 1.0}}), 0.05, 2.0);
    const apply_plan plan = build_plan(zero_order(0.2), g);
    const std::vector<double> f = ones(g);
    const std::vector<double> u = solve_direct(plan, g, f);
    const std::vector<double> r = residual(plan, g, u, f);
    for (double v : r) CHECK(std::abs(v) < 1e-9);
    // Nonnegative data gives a nonnegative solution bounded by sup f / nu0.
    double lo = 1e300, hi = -1e300;
    for (int i : g.omega_bar()) {
        lo = std::min(lo, u[static_cast<std::size_t>(i)]);
        hi = std::max(hi, u[static_cast<std::size_t>(i)]);
    }
    CHECK(lo >= 0.0);
    CHECK(hi <= 1.0 / 1.9739555985 + 1e-9);
}

TEST_CASE("picard rejects non-integrable kernels and oversized steps") {
    const grid g = grid::build(domain({{-1.0, 1.0}}), 0.05, 2.0);
    CHECK_THROWS_AS(solve_picard(build_plan(fractional_half(), g), g, ones(g)),
                    config_error);
    const apply_plan plan = build_plan(zero_order(0.2), g);
    picard_config cfg;
    cfg.a = 1.0;  // a * l1 = pi/eps >> 1
    CHECK_THROWS_AS(solve_picard(plan, g, ones(g), cfg), config_error);
}

TEST_CASE("singular solve pins the boundary and stays positive inside") {
    const grid g = grid::build(domain({{-1.0, 1.0}}), 0.01, 2.0);
    const apply_plan plan = build_plan(fractional_half(), g);
    const std::vector<double> u = solve_direct(plan, g, ones(g));
    CHECK(u[static_cast<std::size_t>(g.index_of(-1.0))] == 0.0);
    CHECK(u[static_cast<std::size_t>(g.index_of(1.0))] == 0.0);
    CHECK(u[static_cast<std::size_t>(g.index_of(0.0))] > 0.0);
    // The solution of the pure fractional problem with f = 1 on (-1, 1) at
    // sigma = 1/2 stays below the exact profile bound sqrt(1-x^2)/c with
    // room for the O(h) discretization; just require a sane sup.
    double hi = 0.0;
    for (int i : g.omega_bar()) hi = std::max(hi, u[static_cast<std::size_t>(i)]);
    CHECK(hi < 2.0);
}

TEST_CASE("isaacs solve matches the extremal linear solve") {
    // Constant coefficients 0.5 and 2.0: at the solution the base apply is
    // negative everywhere, so the pointwise min always picks the larger
    // coefficient and the inf-sup solution equals that linear solve.
    const grid g = grid::build(domain({{-1.0, 1.0}}), 0.05, 2.0);
    auto with_coeff = [&](double lvl) {
        kernel_spec ks = zero_order(0.2);
        ks.family = kernel_family::anisotropic;
        ks.coefficient.r = {0.0, 1.0};
        ks.coefficient.v = {lvl, lvl};
        ks.lambda1 = 0.5;
        ks.lambda2 = 2.0;
        return ks;
    };
    const isaacs_family fam =
        build_isaacs_family({{with_coeff(0.5)}, {with_coeff(2.0)}}, g);
    auto [u, rep] = solve_isaacs(fam, g, ones(g));
    CHECK(rep.converged);
    CHECK(rep.theoretical_factor < 1.0);

    const std::vector<double> u2 =
        solve_direct(build_plan(with_coeff(2.0), g, apply_form::first_difference), g,
                     ones(g));
    CHECK(max_abs_diff(u, u2) < 1e-7);
}

TEST_CASE("implicit euler is monotone and settles at the elliptic solution") {
    const grid g = grid::build(domain({{-1.0, 1.0}}), 0.1, 2.0);
    const apply_plan plan = build_plan(zero_order(0.4), g);
    const std::vector<double> f = ones(g);
    const std::vector<double> u0(static_cast<std::size_t>(g.size()), 0.0);
    parabolic_config cfg;
    cfg.dt = 0.5;
    cfg.t_final = 50.0;
    cfg.scheme = time_scheme::implicit_euler;
    const parabolic_result traj = solve_parabolic(plan, g, u0, f, cfg);
    REQUIRE(traj.states.size() == 101);
    CHECK(traj.times.front() == 0.0);
    CHECK(traj.times.back() == doctest::Approx(50.0));
    for (std::size_t m = 1; m < traj.states.size(); ++m)
        for (int i : g.omega_bar())
            CHECK(traj.states[m][static_cast<std::size_t>(i)] >=
                  traj.states[m - 1][static_cast<std::size_t>(i)] - 1e-12);
    const std::vector<double> u_ell = solve_direct(plan, g, f);
    CHECK(max_abs_diff(traj.states.back(), u_ell) < 1e-4);
}

TEST_CASE("explicit euler reproduces the hand-rolled first step") {
    const grid g = grid::build(domain({{-1.0, 1.0}}), 0.1, 2.0);
    const apply_plan plan = build_plan(zero_order(0.4), g);
    const std::vector<double> f = ones(g);
    std::vector<double> u0(static_cast<std::size_t>(g.size()), 0.0);
    for (int i : g.omega_bar()) u0[static_cast<std::size_t>(i)] = 0.1;
    parabolic_config cfg;
    cfg.dt = 0.1;
    cfg.t_final = 0.5;
    cfg.scheme = time_scheme::explicit_euler;
    const parabolic_result traj = solve_parabolic(plan, g, u0, f, cfg);
    REQUIRE(traj.states.size() == 6);
    for (int i : g.omega_bar()) {
        const double step =
            u0[static_cast<std::size_t>(i)] + 0.1 * (apply_at(plan, g, u0, i) + 1.0);
        CHECK(traj.states[1][static_cast<std::size_t>(i)] ==
              doctest::Approx(step).epsilon(1e-12));
    }
    // Exterior nodes never move.
    CHECK(traj.states.back()[0] == 0.0);
}

TEST_CASE("parabolic configuration errors") {
    const grid g = grid::build(domain({{-1.0, 1.0}}), 0.1, 2.0);
    const apply_plan plan = build_plan(zero_order(0.4), g);
    const std::vector<double> u0(static_cast<std::size_t>(g.size()), 0.0);
    parabolic_config cfg;
    cfg.dt = 0.3;
    cfg.t_final = 0.5;  // not divisible
    CHECK_THROWS_AS(solve_parabolic(plan, g, u0, ones(g), cfg), config_error);

    cfg.dt = 0.5;
    cfg.scheme = time_scheme::explicit_euler;  // dt * l1 = 0.5 * pi/0.4 > 1
    CHECK_THROWS_AS(solve_parabolic(plan, g, u0, ones(g), cfg), config_error);

    const grid gs = grid::build(domain({{-1.0, 1.0}}), 0.05, 2.0);
    const apply_plan sing = build_plan(fractional_half(), gs);
    const std::vector<double> s0(static_cast<std::size_t>(gs.size()), 0.0);
    parabolic_config scfg;
    scfg.dt = 0.1;
    scfg.t_final = 1.0;
    scfg.scheme = time_scheme::explicit_euler;
    CHECK_THROWS_AS(solve_parabolic(sing, gs, s0, ones(gs), scfg), config_error);
}

TEST_CASE("time-dependent forcing reaches the steady state of its limit") {
    // f(t) ramps up to 1; the trajectory must land on the same steady state.
    const grid g = grid::build(domain({{-1.0, 1.0}}), 0.1, 2.0);
    const apply_plan plan = build_plan(zero_order(0.4), g);
    const std::vector<double> u0(static_cast<std::size_t>(g.size()), 0.0);
    parabolic_config cfg;
    cfg.dt = 0.5;
    cfg.t_final = 60.0;
    const auto rhs = [&](double t, std::span<double> out) {
        const double v = std::min(1.0, t / 5.0);
        for (double& o : out) o = v;
    };
    const parabolic_result traj = solve_parabolic(plan, g, u0, rhs, cfg);
    const std::vector<double> u_ell = solve_direct(plan, g, ones(g));
    CHECK(max_abs_diff(traj.states.back(), u_ell) < 1e-4);
}
