#include <nonloc/plan.hpp>

#include <nonloc/errors.hpp>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace nonloc {
namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

using gl16 = boost::math::quadrature::gauss<double, 16>;

/// Mass of the density over one positive smooth piece [a, b]. Pieces inside
/// the peak region |z| < eps get one bisection on top of the 16-point rule.
double piece_mass(const kernel_spec& spec, double a, double b, double peak) {
    if (b <= a) return 0.0;
    const auto f = [&](double z) { return eval_kernel(spec, z); };
    if (a < peak) {
        const double m = 0.5 * (a + b);
        return gl16::integrate(f, a, m) + gl16::integrate(f, m, b);
    }
    return gl16::integrate(f, a, b);
}

/// Mass over [a, b] with 0 <= a < b, split at the density breakpoints.
double range_mass(const kernel_spec& spec, double a, double b,
                  const std::vector<double>& kinks, double peak) {
    b = std::min(b, support_radius(spec));
    if (b <= a) return 0.0;
    double total = 0.0;
    double lo = a;
    for (double k : kinks) {
        if (k <= lo) continue;
        if (k >= b) break;
        total += piece_mass(spec, lo, k, peak);
        lo = k;
    }
    return total + piece_mass(spec, lo, b, peak);
}

double peak_radius(const kernel_spec& spec) {
    switch (spec.family) {
    case kernel_family::zero_order:
    case kernel_family::anisotropic:
    case kernel_family::regularized_singular:
        return spec.epsilon;
    default:
        return 0.0;
    }
}

} // namespace

std::vector<double> cell_weights(const kernel_spec& spec, double h, int K) {
    if (!(h > 0.0)) throw config_error("plan: step h must be positive");
    if (K < 1) throw config_error("plan: need at least one cell per side");
    const std::vector<double> kinks = density_breakpoints(spec);
    const double peak = peak_radius(spec);
    const bool integrable = is_integrable(spec);

    std::vector<double> w(static_cast<std::size_t>(2 * K + 1), 0.0);
    for (int k = -K; k <= K; ++k) {
        const std::size_t idx = static_cast<std::size_t>(k + K);
        if (k == 0) {
            // The origin cell of a non-integrable density carries infinite
            // mass; its contribution enters through the second-moment
            // correction instead.
            w[idx] = integrable
                         ? 2.0 * range_mass(spec, 0.0, 0.5 * h, kinks, peak)
                         : 0.0;
            continue;
        }
        const double center = std::abs(k) * h;
        w[idx] = range_mass(spec, center - 0.5 * h, center + 0.5 * h, kinks, peak);
    }
    return w;
}

double origin_cell_moment(const kernel_spec& spec, double h) {
    if (!(h > 0.0)) throw config_error("plan: step h must be positive");
    const double half = 0.5 * h;
    if (spec.family == kernel_family::singular_fractional) {
        const double q = 2.0 - 2.0 * spec.sigma;
        return std::pow(half, q) / q;
    }
    // z^2 * density is bounded on [0, h/2] for every family (z^{2-alpha} at
    // worst); tanh-sinh handles the fractional-power endpoint. The
    // regularized branch is rewritten as z^{2-a} e^a J(z) because the naive
    // product z^2 * (z/e)^{-a} turns into 0 * inf under the endpoint
    // refinement.
    boost::math::quadrature::tanh_sinh<double> ts;
    const auto f = [&](double z) {
        if (spec.family == kernel_family::regularized_singular && z < spec.epsilon)
            return std::pow(z, 2.0 - spec.alpha) * std::pow(spec.epsilon, spec.alpha) *
                   spec.base_density.interp(z, false);
        return z * z * eval_kernel(spec, z);
    };
    double total = 0.0;
    double lo = 0.0;
    for (double k : density_breakpoints(spec)) {
        if (k >= half) break;
        total += ts.integrate(f, lo, k, 1e-10);
        lo = k;
    }
    return total + ts.integrate(f, lo, half, 1e-10);
}

apply_plan build_plan(const kernel_spec& spec, const grid& g,
                      std::optional<apply_form> form) {
    validate(spec);

    apply_plan plan;
    plan.spec = spec;
    plan.K = g.pad_cells();
    plan.h = g.h();

    const bool integrable = is_integrable(spec);
    plan.form = form.value_or(integrable ? apply_form::first_difference
                                         : apply_form::second_difference);
    if (!integrable && plan.form == apply_form::first_difference)
        throw config_error("plan: first differences are undefined for a "
                           "non-integrable kernel; use the second-difference form");

    const double diam = g.dom().diameter();
    if (plan.K * plan.h + 1e-12 < diam)
        throw config_error("plan: truncation radius K*h = " +
                           std::to_string(plan.K * plan.h) +
                           " must reach the domain diameter " + std::to_string(diam));
    if ((spec.family == kernel_family::zero_order ||
         spec.family == kernel_family::anisotropic) &&
        plan.h > spec.epsilon / 4.0 + 1e-12)
        throw config_error("plan: this family needs h <= epsilon/4 to resolve "
                           "the kernel peak (h = " + std::to_string(plan.h) +
                           ", epsilon = " + std::to_string(spec.epsilon) + ")");

    const std::vector<double> centered = cell_weights(spec, plan.h, plan.K);
    const double w0 = centered[static_cast<std::size_t>(plan.K)];
    double sides = 0.0;
    for (int k = 1; k <= plan.K; ++k) {
        sides += centered[static_cast<std::size_t>(plan.K + k)] +
                 centered[static_cast<std::size_t>(plan.K - k)];
    }
    plan.weight_sum = w0 + sides;
    plan.l1 = l1_norm(spec);

    if (integrable) {
        // Exact identity: everything not inside the pad is tail. The unit
        // tests cross-check this against direct quadrature of the far field.
        plan.tail = std::max(0.0, plan.l1 - plan.weight_sum);
        plan.c0 = 0.0;
    } else {
        plan.tail = tail_mass(spec, plan.truncation_radius());
        plan.c0 = origin_cell_moment(spec, plan.h) / (plan.h * plan.h);
        plan.dirichlet_boundary = true;
    }

    if (plan.form == apply_form::first_difference) {
        plan.w = centered;
        plan.diag = plan.weight_sum + plan.tail;  // equals l1 up to quadrature
    } else {
        plan.w.resize(static_cast<std::size_t>(plan.K));
        for (int k = 1; k <= plan.K; ++k) {
            // Symmetric kernels in 1d make the two sides equal; averaging
            // keeps the discrete operator exactly even either way.
            plan.w[static_cast<std::size_t>(k - 1)] =
                0.5 * (centered[static_cast<std::size_t>(plan.K + k)] +
                       centered[static_cast<std::size_t>(plan.K - k)]);
        }
        double s1 = 0.0;
        for (double v : plan.w) s1 += v;
        plan.diag = 2.0 * s1 + 2.0 * plan.c0 + plan.tail;
    }
    return plan;
}

isaacs_family build_isaacs_family(const std::vector<std::vector<kernel_spec>>& specs,
                                  const grid& g) {
    if (specs.empty() || specs.front().empty())
        throw config_error("isaacs: the control family must be nonempty");
    isaacs_family fam;
    fam.n_alpha = static_cast<int>(specs.size());
    fam.n_beta = static_cast<int>(specs.front().size());
    fam.lambda1 = inf;
    fam.lambda2 = 0.0;
    for (const auto& row : specs) {
        if (static_cast<int>(row.size()) != fam.n_beta)
            throw config_error("isaacs: ragged control family");
        for (const kernel_spec& spec : row) {
            if (!is_integrable(spec))
                throw config_error("isaacs: control kernels must be integrable");
            fam.plans.push_back(build_plan(spec, g, apply_form::first_difference));
            fam.lambda1 = std::min(fam.lambda1, spec.lambda1);
            fam.lambda2 = std::max(fam.lambda2, spec.lambda2);
        }
    }
    return fam;
}

} // namespace nonloc
