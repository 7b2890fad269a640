#include <nonloc/analysis.hpp>

#include <nonloc/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace nonloc {
namespace {

constexpr double qnan = std::numeric_limits<double>::quiet_NaN();

} // namespace

comparison_result comparison_check(const apply_plan& plan, const grid& g,
                                   std::span<const double> u, std::span<const double> v,
                                   std::span<const double> f_u, std::span<const double> f_v,
                                   double cert_tol) {
    comparison_result res;
    const std::vector<double> ru = residual(plan, g, u, f_u);
    const std::vector<double> rv = residual(plan, g, v, f_v);
    for (int i : g.omega_bar()) {
        const std::size_t s = static_cast<std::size_t>(i);
        // r = -apply - f, so a subsolution has r <= 0 and a supersolution
        // r >= 0, both up to the certificate tolerance.
        if (ru[s] > cert_tol) {
            res.note = "u is not a subsolution at node " + std::to_string(i);
            return res;
        }
        if (rv[s] < -cert_tol) {
            res.note = "v is not a supersolution at node " + std::to_string(i);
            return res;
        }
        if (f_u[s] > f_v[s] + cert_tol) {
            res.note = "forcing order f_u <= f_v fails at node " + std::to_string(i);
            return res;
        }
    }
    for (int i = 0; i < g.size(); ++i) {
        if (g.cls(i) != node_class::exterior) continue;
        const std::size_t s = static_cast<std::size_t>(i);
        if (u[s] > v[s] + cert_tol) {
            res.note = "exterior order u <= v fails at node " + std::to_string(i);
            return res;
        }
    }
    res.precondition_ok = true;

    res.gap = -std::numeric_limits<double>::infinity();
    res.pass = true;
    for (int i : g.omega_bar()) {
        const std::size_t s = static_cast<std::size_t>(i);
        const double diff = u[s] - v[s];
        if (diff > res.gap) {
            res.gap = diff;
            if (diff > 1e-12) res.witness_node = i;
        }
    }
    res.pass = res.gap <= 1e-12;
    return res;
}

double linfty_bound_constant(double sigma, const domain& dom) {
    if (!(sigma > 0.0 && sigma < 1.0))
        throw config_error("analysis: sigma must lie in (0,1)");
    const double R = dom.diameter();
    return (1.0 / (2.0 * sigma)) * 2.0 * std::pow(R + 1.0, -2.0 * sigma);
}

linfty_report linfty_bound_check(const grid& g, std::span<const double> u,
                                 double f_sup, double sigma) {
    linfty_report rep;
    rep.bound = linfty_bound_constant(sigma, g.dom()) * f_sup;
    for (int i : g.omega_bar()) {
        const double a = std::abs(u[static_cast<std::size_t>(i)]);
        if (a > rep.sup_u) {
            rep.sup_u = a;
            rep.argmax_node = i;
        }
    }
    rep.margin = rep.bound - rep.sup_u;
    rep.pass = rep.margin >= 0.0;
    return rep;
}

positivity_report boundary_positivity_check(const grid& g_h, std::span<const double> u_h,
                                            const grid& g_h2, std::span<const double> u_h2,
                                            std::span<const double> f_on_h, double rho0) {
    positivity_report rep;
    if (!(rho0 > 0.0)) throw config_error("analysis: positivity threshold must be > 0");
    for (int i : g_h.omega_bar())
        if (f_on_h[static_cast<std::size_t>(i)] < rho0) {
            rep.skipped = true;
            rep.pass = true;
            return rep;
        }

    rep.min_interior = std::numeric_limits<double>::infinity();
    bool ok = true;
    for (int i : g_h.omega_bar()) {
        if (g_h.cls(i) == node_class::interior) {
            rep.min_interior = std::min(rep.min_interior, u_h[static_cast<std::size_t>(i)]);
        } else {
            const double coarse = u_h[static_cast<std::size_t>(i)];
            const double fine = u_h2[static_cast<std::size_t>(g_h2.index_of(g_h.x(i)))];
            rep.boundary_coarse.push_back(coarse);
            rep.boundary_fine.push_back(fine);
            if (!(coarse > 0.0 && fine > 0.0)) {
                ok = false;
                continue;
            }
            rep.worst_ratio_dev =
                std::max(rep.worst_ratio_dev, std::abs(fine / coarse - 1.0));
        }
    }
    ok = ok && rep.min_interior > 0.0 && rep.worst_ratio_dev <= 0.25;
    rep.pass = ok;
    return rep;
}

modulus_estimate modulus_of_continuity(const grid& g, std::span<const double> u,
                                       const std::function<bool(double)>& restriction,
                                       std::span<const double> t_values) {
    for (std::size_t k = 1; k < t_values.size(); ++k)
        if (!(t_values[k] > t_values[k - 1]))
            throw config_error("analysis: modulus t values must increase");

    std::vector<int> nodes;
    for (int i : g.omega_bar())
        if (restriction(g.x(i))) nodes.push_back(i);

    modulus_estimate est;
    est.t.assign(t_values.begin(), t_values.end());
    est.m.assign(t_values.size(), 0.0);
    // Bin each pair at the first admissible t, then make the result
    // cumulative; the sup over |x-y| <= t is then exact per t.
    for (std::size_t a = 0; a < nodes.size(); ++a) {
        for (std::size_t b = a + 1; b < nodes.size(); ++b) {
            const double gap = g.x(nodes[b]) - g.x(nodes[a]);
            const auto it = std::lower_bound(est.t.begin(), est.t.end(), gap - 1e-12);
            if (it == est.t.end()) continue;
            const std::size_t bin = static_cast<std::size_t>(it - est.t.begin());
            const double diff = std::abs(u[static_cast<std::size_t>(nodes[b])] -
                                         u[static_cast<std::size_t>(nodes[a])]);
            est.m[bin] = std::max(est.m[bin], diff);
        }
    }
    for (std::size_t k = 1; k < est.m.size(); ++k)
        est.m[k] = std::max(est.m[k], est.m[k - 1]);
    return est;
}

envelope_result equicontinuity_envelope(std::span<const modulus_estimate> members,
                                        std::span<const double> eps_list) {
    if (members.size() < 3 || members.size() != eps_list.size())
        throw config_error("analysis: envelope needs at least three family members");
    const auto [lo, hi] = std::minmax_element(eps_list.begin(), eps_list.end());
    if (*hi < 4.0 * *lo)
        throw config_error("analysis: epsilon list must span at least a factor 4");
    envelope_result env;
    env.t = members.front().t;
    env.m.assign(env.t.size(), 0.0);
    for (const modulus_estimate& est : members) {
        if (est.t != env.t)
            throw config_error("analysis: envelope members use different t grids");
        for (std::size_t k = 0; k < env.m.size(); ++k)
            env.m[k] = std::max(env.m[k], est.m[k]);
    }
    env.small_t_ratio = env.m.back() > 0.0 ? env.m.front() / env.m.back() : 0.0;
    return env;
}

jump_fit_result boundary_jump_fit(std::span<const labeled_solution> sols,
                                  double strip_d0, double spread_threshold) {
    jump_fit_result fit;
    std::vector<std::vector<jump_sample>> per_eps;
    for (const labeled_solution& sol : sols) {
        std::vector<jump_sample> samples;
        for (int i : sol.g->omega_bar()) {
            const double d = std::max(0.0, sol.g->distance(i));
            if (d > strip_d0 + 1e-12) continue;
            const double a = std::abs(sol.u[static_cast<std::size_t>(i)]);
            if (a <= 1e-12) continue;
            samples.push_back({sol.eps, d, a});
        }
        if (samples.empty())
            throw config_error("analysis: jump-fit strip is empty for one epsilon");
        fit.data.insert(fit.data.end(), samples.begin(), samples.end());
        per_eps.push_back(std::move(samples));
    }
    if (fit.data.empty()) {
        fit.degenerate = true;
        return fit;
    }

    // Tightest per-epsilon constant at exponent beta, then the spread of
    // those constants across the family; one majorant fits the whole family
    // exactly when the spread vanishes.
    const auto tightness = [&](const std::vector<jump_sample>& samples, double beta) {
        double t = 0.0;
        for (const jump_sample& s : samples)
            t = std::max(t, s.absu / std::pow(s.eps + s.d, beta));
        return t;
    };

    double best_beta = qnan, best_spread = std::numeric_limits<double>::infinity(),
           best_c0 = qnan;
    for (int j = 1; j <= 19; ++j) {
        const double beta = 0.05 * j;
        double tmin = std::numeric_limits<double>::infinity(), tmax = 0.0;
        for (const auto& samples : per_eps) {
            const double t = tightness(samples, beta);
            tmin = std::min(tmin, t);
            tmax = std::max(tmax, t);
        }
        const double spread = tmax > 0.0 ? 1.0 - tmin / tmax : 0.0;
        fit.scan.emplace_back(beta, spread);
        const bool better = spread <= spread_threshold
                                ? !(best_spread <= spread_threshold && best_beta >= beta)
                                : best_spread > spread_threshold && spread < best_spread;
        if (better) {
            best_beta = beta;
            best_spread = spread;
            best_c0 = tmax;
        }
    }
    fit.beta0 = best_beta;
    fit.C0 = best_c0;
    fit.residual = best_spread;
    return fit;
}

csigma_calibration calibrate_c_sigma(double sigma, double h) {
    if (!(sigma > 0.0 && sigma < 1.0))
        throw config_error("analysis: sigma must lie in (0,1)");
    const domain dom({{-1.0, 1.0}});
    kernel_spec ks;
    ks.family = kernel_family::singular_fractional;
    ks.sigma = sigma;
    ks.epsilon = 0.0;

    const auto one_level = [&](double hh) {
        const grid g = grid::build(dom, hh, dom.diameter());
        const apply_plan plan = build_plan(ks, g);
        std::vector<double> prof(static_cast<std::size_t>(g.size()), 0.0);
        for (int i : g.omega_bar()) {
            const double x = g.x(i);
            prof[static_cast<std::size_t>(i)] = std::pow(std::max(0.0, 1.0 - x * x), sigma);
        }
        const double val = -apply_at(plan, g, prof, g.index_of(0.0));
        if (!(val > 0.0))
            throw internal_error("analysis: singular apply of the reference "
                                 "profile was not positive at the center");
        return 1.0 / val;
    };

    csigma_calibration cal;
    cal.c_h = one_level(h);
    cal.c_h2 = one_level(h / 2.0);
    cal.c_sigma = 2.0 * cal.c_h2 - cal.c_h;
    return cal;
}

std::vector<double> fractional_reference_exact(const grid& g, double sigma,
                                               double c_sigma) {
    if (!(sigma > 0.0 && sigma < 1.0))
        throw config_error("analysis: sigma must lie in (0,1)");
    std::vector<double> u(static_cast<std::size_t>(g.size()), 0.0);
    for (int i : g.omega_bar()) {
        const double x = g.x(i);
        u[static_cast<std::size_t>(i)] =
            c_sigma * std::pow(std::max(0.0, 1.0 - x * x), sigma);
    }
    return u;
}

std::vector<double> fractional_reference_numeric(const grid& g, double sigma) {
    kernel_spec ks;
    ks.family = kernel_family::singular_fractional;
    ks.sigma = sigma;
    ks.epsilon = 0.0;
    const apply_plan plan = build_plan(ks, g);
    const std::vector<double> f(static_cast<std::size_t>(g.size()), 1.0);
    return solve_direct(plan, g, f);
}

rate_fit convergence_study(double sigma, std::span<const double> eps_list,
                           const domain& dom, double interior_delta) {
    if (eps_list.empty()) throw config_error("analysis: empty epsilon list");
    rate_fit fit;
    fit.c_sigma = calibrate_c_sigma(sigma).c_sigma;

    for (double eps : eps_list) {
        const grid g = grid::build(dom, eps / 4.0, dom.diameter());
        kernel_spec ks;
        ks.family = kernel_family::zero_order;
        ks.sigma = sigma;
        ks.epsilon = eps;
        const apply_plan plan = build_plan(ks, g);
        const std::vector<double> f(static_cast<std::size_t>(g.size()), 1.0);
        const std::vector<double> u = solve_direct(plan, g, f);
        const std::vector<double> ref = fractional_reference_exact(g, sigma, fit.c_sigma);

        double err = 0.0, ierr = 0.0;
        for (int i : g.omega_bar()) {
            const double d = std::abs(u[static_cast<std::size_t>(i)] -
                                      ref[static_cast<std::size_t>(i)]);
            err = std::max(err, d);
            if (g.distance(i) >= interior_delta) ierr = std::max(ierr, d);
        }
        fit.eps.push_back(eps);
        fit.errors.push_back(err);
        fit.interior_errors.push_back(ierr);
    }

    fit.monotone = true;
    double worst_ratio = 0.0;
    for (std::size_t k = 1; k < fit.errors.size(); ++k) {
        const double ratio = fit.errors[k] / fit.errors[k - 1];
        worst_ratio = std::max(worst_ratio, ratio);
        if (ratio >= 1.0) fit.monotone = false;
    }
    fit.flagged = worst_ratio > 1.5;

    if (fit.errors.size() >= 2) {
        // log-log least squares for e = C eps^gamma0.
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double n = static_cast<double>(fit.errors.size());
        for (std::size_t k = 0; k < fit.errors.size(); ++k) {
            const double lx = std::log(fit.eps[k]);
            const double ly = std::log(fit.errors[k]);
            sx += lx;
            sy += ly;
            sxx += lx * lx;
            sxy += lx * ly;
        }
        fit.gamma0 = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        fit.C = std::exp((sy - fit.gamma0 * sx) / n);
    }
    return fit;
}

counterexample_report counterexample_study(const radial_table& base_j, double alpha,
                                           std::span<const double> eps_list,
                                           const domain& dom, double f_const,
                                           double interior_delta) {
    if (!(f_const > 0.0))
        throw config_error("analysis: the counterexample forcing must be positive");
    counterexample_report rep;
    rep.u0_boundary_positive = true;

    for (double eps : eps_list) {
        const double trunc = std::max(dom.diameter(), base_j.support());
        const grid g = grid::build(dom, eps / 4.0, trunc);
        const std::vector<double> f(static_cast<std::size_t>(g.size()), f_const);

        kernel_spec limit;
        limit.family = kernel_family::general_j;
        limit.base_density = base_j;
        const std::vector<double> u0 = solve_direct(build_plan(limit, g), g, f);

        kernel_spec reg;
        reg.family = kernel_family::regularized_singular;
        reg.base_density = base_j;
        reg.alpha = alpha;
        reg.epsilon = eps;
        const std::vector<double> ue = solve_direct(build_plan(reg, g), g, f);

        double ierr = 0.0, gerr = 0.0, ub = std::numeric_limits<double>::infinity();
        for (int i : g.omega_bar()) {
            const std::size_t s = static_cast<std::size_t>(i);
            const double d = std::abs(ue[s] - u0[s]);
            gerr = std::max(gerr, d);
            if (g.distance(i) >= interior_delta) ierr = std::max(ierr, d);
            if (g.cls(i) == node_class::boundary) ub = std::min(ub, u0[s]);
        }
        rep.u0_boundary_positive = rep.u0_boundary_positive && ub > 0.0;

        const double collar = 4.0 * g.h();
        const std::vector<double> tv{collar};
        const modulus_estimate collar_mod = modulus_of_continuity(
            g, ue,
            [&](double x) {
                return g.dom().contains_closure(x) &&
                       g.dom().signed_distance(x) <= collar + 1e-12;
            },
            tv);

        rep.eps.push_back(eps);
        rep.interior_err.push_back(ierr);
        rep.global_err.push_back(gerr);
        rep.collar_modulus.push_back(collar_mod.m.front());
        rep.u0_boundary.push_back(ub);
    }

    if (!rep.interior_err.empty() && rep.interior_err.back() > 0.0)
        rep.interior_decrease = rep.interior_err.front() / rep.interior_err.back();
    rep.min_global_over_jump = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < rep.eps.size(); ++k)
        if (rep.u0_boundary[k] > 0.0)
            rep.min_global_over_jump = std::min(rep.min_global_over_jump,
                                                rep.global_err[k] / rep.u0_boundary[k]);
    return rep;
}

} // namespace nonloc
