#include <nonloc/barriers.hpp>

#include <nonloc/errors.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace nonloc {
namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

double psi_value(const barrier_spec& s, const domain& dom, double x) {
    if (!dom.contains_closure(x)) return 0.0;
    const double d = std::max(0.0, dom.signed_distance(x));
    return std::pow(s.epsilon + std::min(d, s.d0), s.beta);
}

double zeta_value(const barrier_spec& s, const domain& dom, double x) {
    const double ay = std::abs(s.y);
    if (!dom.contains_closure(x)) return 0.0;
    const double d = dom.signed_distance(x);
    if (d < ay) return 0.0;  // outside the depth core
    const double e = s.zeta_exponent > 0.0 ? s.zeta_exponent : s.epsilon;
    const double capped = std::min(s.epsilon + s.dbar - ay, s.epsilon + d - ay);
    return std::pow(capped, e);
}

double eta_value(const barrier_spec& s, const domain& dom, double x) {
    const double ay = std::abs(s.y);
    const double d = dom.signed_distance(x);
    if (d < -ay || d >= ay) return 0.0;
    return s.C0 * std::pow(s.epsilon + ay, s.beta0);
}

} // namespace

double eval_barrier(const barrier_spec& s, const domain& dom, double x) {
    switch (s.kind) {
    case barrier_kind::psi:
        if (!(s.beta > 0.0 && s.beta < 1.0))
            throw config_error("barrier: psi exponent must lie in (0,1)");
        if (!(s.epsilon > 0.0)) throw config_error("barrier: psi needs epsilon > 0");
        return psi_value(s, dom, x);
    case barrier_kind::chi:
        return dom.contains_closure(x) ? s.scale : 0.0;
    case barrier_kind::zeta:
        if (!(s.epsilon > 0.0 && s.dbar > std::abs(s.y)))
            throw config_error("barrier: zeta needs epsilon > 0 and dbar > |y|");
        return zeta_value(s, dom, x);
    case barrier_kind::eta:
        if (!(s.epsilon > 0.0 && s.beta0 > 0.0 && s.C0 > 0.0))
            throw config_error("barrier: eta needs epsilon, beta0, C0 positive");
        return eta_value(s, dom, x);
    case barrier_kind::w: {
        if (!(s.A > 0.0) || !(s.m_y >= 0.0))
            throw config_error("barrier: W needs amplitude A > 0 and m(|y|) >= 0");
        if (!(s.epsilon > 0.0 && s.beta0 > 0.0 && s.C0 > 0.0 && s.dbar > std::abs(s.y)))
            throw config_error("barrier: W needs epsilon, beta0, C0, dbar > |y|");
        return eta_value(s, dom, x) + s.A * s.m_y * zeta_value(s, dom, x);
    }
    case barrier_kind::z: {
        if (!(s.A > 0.0 && s.C0 > 0.0 && s.beta0 > 0.0))
            throw config_error("barrier: Z needs A, C0, beta0 positive");
        const sigma_sets sets(dom, s.y, s.dbar);
        if (sets.in_sigma2(x)) return s.A * s.m0_y;
        if (sets.in_sigma3(x)) return s.C0 * std::pow(s.epsilon + std::abs(s.y), s.beta0);
        return 0.0;
    }
    }
    return 0.0;
}

sigma_sets::sigma_sets(domain dom, double y, double dbar)
    : dom_(std::move(dom)), y_(y), dbar_(dbar) {
    if (!(dbar > 0.0)) throw config_error("sigma sets: dbar must be positive");
    if (std::abs(y) > dbar / 8.0 + 1e-12)
        throw config_error("sigma sets: the shift needs |y| <= dbar/8");
}

bool sigma_sets::in_sigma1(double x) const {
    return dom_.contains_closure(x) || dom_.contains_closure(x + y_);
}

bool sigma_sets::in_sigma2(double x) const {
    return dom_.contains(x) && dom_.contains(x + y_);
}

bool sigma_sets::in_sigma3(double x) const {
    return in_sigma1(x) && !in_sigma2(x);
}

bool sigma_sets::in_sigma4(double x) const {
    const auto core = [this](double t) {
        return dom_.contains(t) && dom_.signed_distance(t) > dbar_ / 2.0;
    };
    return core(x) || core(x + y_);
}

supersolution_report
check_supersolution(const barrier_spec& spec, const apply_plan& plan, const grid& g,
                    const std::function<double(double)>& rhs,
                    const std::function<bool(double)>& strip) {
    if (spec.kind == barrier_kind::psi) {
        const double cap = std::min(1.0, 2.0 * plan.spec.sigma);
        if (!(spec.beta < cap))
            throw config_error("barrier: psi exponent must stay below min{1, 2 sigma}");
    }
    std::vector<double> bar(static_cast<std::size_t>(g.size()));
    for (int i = 0; i < g.size(); ++i)
        bar[static_cast<std::size_t>(i)] = eval_barrier(spec, g.dom(), g.x(i));

    supersolution_report rep;
    rep.min_margin = inf;
    double worst_cstar = inf;
    for (int i : g.omega_bar()) {
        const double x = g.x(i);
        if (!strip(x)) continue;
        const double neg_apply = -apply_at(plan, g, bar, i);
        const double margin = neg_apply - rhs(x);
        if (margin < rep.min_margin) {
            rep.min_margin = margin;
            rep.argmin_node = i;
        }
        if (spec.kind == barrier_kind::psi) {
            const double d = std::max(0.0, g.distance(i));
            worst_cstar = std::min(
                worst_cstar,
                neg_apply * std::pow(spec.epsilon + d, 2.0 * plan.spec.sigma - spec.beta));
        }
        ++rep.nodes_tested;
    }
    if (rep.nodes_tested == 0)
        throw config_error("barrier: the test strip contains no grid nodes");
    if (spec.kind == barrier_kind::psi) rep.c_star = worst_cstar;
    rep.pass = rep.min_margin >= 0.0;
    return rep;
}

namespace {

/// Smallest certified constant for one (epsilon, h-level): min over the strip
/// of -apply(psi) * (eps + d)^{2s - beta}, precomputed for every beta and
/// returned per strip width by prefix minima over depth-sorted nodes.
struct psi_scan {
    std::vector<double> depth;                 ///< sorted node depths
    std::vector<std::vector<double>> value;    ///< [beta index][node], same order
};

psi_scan scan_for(const kernel_spec& ks, const domain& dom, double h_target,
                  std::span<const double> betas) {
    const grid g = grid::build(dom, h_target, dom.diameter());
    const apply_plan plan = build_plan(ks, g);

    std::vector<int> nodes(g.omega_bar().begin(), g.omega_bar().end());
    std::sort(nodes.begin(), nodes.end(),
              [&](int a, int b) { return g.distance(a) < g.distance(b); });

    psi_scan scan;
    scan.depth.reserve(nodes.size());
    for (int i : nodes) scan.depth.push_back(std::max(0.0, g.distance(i)));

    std::vector<double> bar(static_cast<std::size_t>(g.size()));
    for (std::size_t bi = 0; bi < betas.size(); ++bi) {
        const double beta = betas[bi];
        barrier_spec bs;
        bs.kind = barrier_kind::psi;
        bs.beta = beta;
        bs.epsilon = ks.epsilon;
        for (int i = 0; i < g.size(); ++i)
            bar[static_cast<std::size_t>(i)] = eval_barrier(bs, dom, g.x(i));
        std::vector<double> row;
        row.reserve(nodes.size());
        for (std::size_t r = 0; r < nodes.size(); ++r) {
            const double neg = -apply_at(plan, g, bar, nodes[r]);
            row.push_back(neg * std::pow(ks.epsilon + scan.depth[r],
                                         2.0 * ks.sigma - beta));
        }
        scan.value.push_back(std::move(row));
    }
    return scan;
}

double strip_min(const psi_scan& scan, std::size_t beta_index, double dbar) {
    double m = inf;
    const auto& row = scan.value[beta_index];
    for (std::size_t r = 0; r < row.size() && scan.depth[r] <= dbar + 1e-12; ++r)
        m = std::min(m, row[r]);
    return m;
}

} // namespace

beta0_certificate fit_beta0(std::span<const kernel_spec> family, const domain& dom) {
    if (family.empty()) throw config_error("fit_beta0: empty epsilon list");
    double sigma = family.front().sigma;
    for (const kernel_spec& ks : family) {
        if (!is_integrable(ks))
            throw config_error("fit_beta0: the sweep needs integrable kernels");
        if (!(ks.epsilon > 0.0 && ks.epsilon < 1.0))
            throw config_error("fit_beta0: epsilon list must lie in (0,1)");
        if (ks.sigma != sigma)
            throw config_error("fit_beta0: mixed sigma in the epsilon list");
    }

    std::vector<double> betas;
    for (double b = 0.05; b < std::min(1.0, 2.0 * sigma) - 0.05 + 1e-9; b += 0.05)
        betas.push_back(b);
    const double delta0 = dom.max_interior_distance();
    std::vector<double> dbars;
    for (int j = 1; j <= 19; ++j) dbars.push_back(delta0 * 0.05 * j);

    std::vector<psi_scan> coarse, fine;
    for (const kernel_spec& ks : family) {
        coarse.push_back(scan_for(ks, dom, ks.epsilon / 4.0, betas));
        fine.push_back(scan_for(ks, dom, ks.epsilon / 8.0, betas));
    }

    double best_failing = -inf;
    for (std::size_t bi = betas.size(); bi-- > 0;) {
        for (std::size_t di = dbars.size(); di-- > 0;) {
            double c_h = inf, c_h2 = inf;
            for (std::size_t e = 0; e < family.size(); ++e) {
                c_h = std::min(c_h, strip_min(coarse[e], bi, dbars[di]));
                c_h2 = std::min(c_h2, strip_min(fine[e], bi, dbars[di]));
            }
            best_failing = std::max(best_failing, std::min(c_h, c_h2));
            if (c_h > 0.0 && c_h2 > 0.0 && std::abs(c_h - c_h2) <= 0.2 * c_h) {
                beta0_certificate cert;
                cert.beta0 = betas[bi];
                cert.dbar = dbars[di];
                cert.c_star = c_h;
                cert.c_star_half = c_h2;
                return cert;
            }
        }
    }
    std::ostringstream msg;
    msg << "fit_beta0: no (beta, strip) pair certified; best failing constant "
        << best_failing;
    throw certification_error(msg.str());
}

w_certificate fit_w_amplitude(barrier_spec w_spec, const apply_plan& plan,
                              const grid& g, double rhs_value, int max_doublings) {
    w_spec.kind = barrier_kind::w;
    const double ay = std::abs(w_spec.y);
    const auto strip = [&](double x) {
        return g.dom().contains_closure(x) && g.dom().signed_distance(x) >= ay;
    };
    const auto rhs = [rhs_value](double) { return rhs_value; };

    double A = 1.0;
    supersolution_report last;
    for (int step = 0; step <= max_doublings; ++step) {
        w_spec.A = A;
        last = check_supersolution(w_spec, plan, g, rhs, strip);
        if (last.pass) return {A, last};
        A *= 2.0;
    }
    std::ostringstream msg;
    msg << "fit_w_amplitude: no amplitude up to 2^" << max_doublings
        << " certified; last margin " << last.min_margin;
    throw certification_error(msg.str());
}

} // namespace nonloc
