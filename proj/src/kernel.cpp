#include <nonloc/kernel.hpp>

#include <nonloc/errors.hpp>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace nonloc {
namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

using gk = boost::math::quadrature::gauss_kronrod<double, 31>;

double gk_integrate(const auto& f, double a, double b) {
    if (b <= a) return 0.0;
    return gk::integrate(f, a, b, 12, 1e-10);
}

} // namespace

std::vector<double> density_breakpoints(const kernel_spec& spec) {
    std::vector<double> pts{1.0};
    if (spec.family == kernel_family::zero_order || spec.family == kernel_family::anisotropic ||
        spec.family == kernel_family::regularized_singular)
        pts.push_back(spec.epsilon);
    for (const radial_table* t : {&spec.base_density, &spec.coefficient})
        for (double r : t->r)
            if (r > 0.0) pts.push_back(r);
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    return pts;
}

double support_radius(const kernel_spec& spec) {
    switch (spec.family) {
    case kernel_family::general_j:
    case kernel_family::regularized_singular:
        return spec.base_density.support();
    default:
        return inf;
    }
}

double radial_table::interp(double radius, bool clamp_beyond) const {
    if (r.empty()) return clamp_beyond ? 1.0 : 0.0;
    if (radius <= r.front()) return v.front();
    if (radius >= r.back()) return clamp_beyond ? v.back() : 0.0;
    const auto it = std::upper_bound(r.begin(), r.end(), radius);
    const std::size_t i = static_cast<std::size_t>(it - r.begin());
    const double t = (radius - r[i - 1]) / (r[i] - r[i - 1]);
    return v[i - 1] + t * (v[i] - v[i - 1]);
}

void validate(const kernel_spec& spec) {
    if (!(spec.sigma > 0.0 && spec.sigma < 1.0))
        throw config_error("kernel: sigma must lie in (0,1)");
    if (spec.dim != 1)
        throw config_error("kernel: only dim = 1 is supported");
    const bool needs_epsilon = spec.family != kernel_family::singular_fractional &&
                               spec.family != kernel_family::general_j;
    if (needs_epsilon && !(spec.epsilon > 0.0))
        throw config_error("kernel: epsilon must be positive for this family");
    if (spec.epsilon < 0.0)
        throw config_error("kernel: epsilon must be nonnegative");
    if (spec.family == kernel_family::regularized_singular &&
        !(spec.alpha > 1.0 && spec.alpha < 2.0))
        throw config_error("kernel: alpha must lie in (1,2)");
    const bool needs_table = spec.family == kernel_family::general_j ||
                             spec.family == kernel_family::regularized_singular;
    if (needs_table) {
        const radial_table& t = spec.base_density;
        if (t.r.size() < 2 || t.r.size() != t.v.size())
            throw config_error("kernel: profile table needs matching radius/value lists");
        if (t.r.front() != 0.0)
            throw config_error("kernel: profile table must start at radius 0");
        for (std::size_t i = 1; i < t.r.size(); ++i)
            if (!(t.r[i] > t.r[i - 1]))
                throw config_error("kernel: profile radii must increase");
        for (double val : t.v)
            if (val < 0.0) throw config_error("kernel: profile values must be nonnegative");
    }
    if (spec.family == kernel_family::anisotropic) {
        if (!(spec.lambda1 > 0.0 && spec.lambda1 < spec.lambda2))
            throw config_error("kernel: need 0 < lambda1 < lambda2");
        for (double val : spec.coefficient.v)
            if (val < spec.lambda1 - 1e-12 || val > spec.lambda2 + 1e-12)
                throw config_error("kernel: coefficient profile violates the ellipticity bounds");
    }
}

bool is_integrable(const kernel_spec& spec) {
    switch (spec.family) {
    case kernel_family::singular_fractional:
    case kernel_family::regularized_singular:
        return false;
    default:
        return true;
    }
}

double eval_kernel(const kernel_spec& spec, double z) {
    const double r = std::abs(z);
    switch (spec.family) {
    case kernel_family::zero_order: {
        const double p = 1.0 + 2.0 * spec.sigma;
        return 1.0 / (std::pow(spec.epsilon, p) + std::pow(r, p));
    }
    case kernel_family::general_j:
        return spec.base_density.interp(r, false);
    case kernel_family::singular_fractional:
        if (r == 0.0) throw config_error("kernel: singular density undefined at z = 0");
        return std::pow(r, -(1.0 + 2.0 * spec.sigma));
    case kernel_family::regularized_singular: {
        if (r == 0.0) throw config_error("kernel: singular density undefined at z = 0");
        const double j = spec.base_density.interp(r, false);
        return r >= spec.epsilon ? j : j * std::pow(spec.epsilon / r, spec.alpha);
    }
    case kernel_family::anisotropic: {
        const double p = 1.0 + 2.0 * spec.sigma;
        const double k = 1.0 / (std::pow(spec.epsilon, p) + std::pow(r, p));
        return k * spec.coefficient.interp(r, true);
    }
    }
    return 0.0;
}

double integrate_density(const kernel_spec& spec, double a, double b) {
    b = std::min(b, support_radius(spec));
    if (b <= a) return 0.0;
    const auto f = [&](double z) { return eval_kernel(spec, z); };
    double total = 0.0;
    double lo = a;
    for (double bp : density_breakpoints(spec)) {
        if (bp <= lo) continue;
        if (bp >= b) break;
        total += gk_integrate(f, lo, bp);
        lo = bp;
    }
    total += gk_integrate(f, lo, b);
    return total;
}

/// One-sided far-field mass over [R, inf) via the t = 1/z substitution.
/// Only the algebraic-tail families reach this; the integrand is rearranged
/// to t^(2s-1) / ((eps t)^(1+2s) + 1) so tiny t cannot overflow.
static double far_field_one_sided(const kernel_spec& spec, double R) {
    const double p = 1.0 + 2.0 * spec.sigma;
    const auto g = [&](double t) {
        const double coeff = spec.family == kernel_family::anisotropic
                                 ? spec.coefficient.interp(1.0 / t, true)
                                 : 1.0;
        return coeff * std::pow(t, p - 2.0) / (std::pow(spec.epsilon * t, p) + 1.0);
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    return ts.integrate(g, 0.0, 1.0 / R, 1e-10);
}

double l1_norm(const kernel_spec& spec) {
    if (!is_integrable(spec)) return inf;
    const double s = support_radius(spec);
    const double near = integrate_density(spec, 0.0, std::max(1.0, spec.epsilon));
    double far = 0.0;
    const double start = std::max(1.0, spec.epsilon);
    if (s < inf)
        far = integrate_density(spec, start, s);
    else
        far = far_field_one_sided(spec, start);
    return 2.0 * (near + far);
}

double tail_mass(const kernel_spec& spec, double R) {
    if (R <= 0.0) throw config_error("kernel: tail radius must be positive");
    const double s = support_radius(spec);
    if (R >= s) return 0.0;
    if (s < inf) return 2.0 * integrate_density(spec, R, s);
    // Split at max(R, 1) so the substitution only sees the algebraic tail.
    const double mid = std::max(R, 1.0);
    return 2.0 * (integrate_density(spec, R, mid) + far_field_one_sided(spec, mid));
}

double second_moment_near_zero(const kernel_spec& spec) {
    if (spec.family == kernel_family::singular_fractional) {
        // integral of |z|^{1-2s} over |z| < 1.
        return 2.0 / (2.0 - 2.0 * spec.sigma);
    }
    // The integrand is bounded (z^(1-2s) at worst) but not smooth at 0 for
    // the singular families; tanh-sinh absorbs the endpoint behavior. The
    // regularized branch is written as z^{2-a} e^a J(z) below e, since the
    // naive z^2 * (z/e)^{-a} evaluates as 0 * inf near the endpoint.
    const auto f = [&](double z) {
        if (spec.family == kernel_family::regularized_singular && z < spec.epsilon)
            return std::pow(z, 2.0 - spec.alpha) * std::pow(spec.epsilon, spec.alpha) *
                   spec.base_density.interp(z, false);
        return z * z * eval_kernel(spec, z);
    };
    boost::math::quadrature::tanh_sinh<double> ts;
    double total = 0.0;
    double lo = 0.0;
    for (double bp : density_breakpoints(spec)) {
        if (bp >= 1.0) break;
        total += ts.integrate(f, lo, bp, 1e-10);
        lo = bp;
    }
    total += ts.integrate(f, lo, 1.0, 1e-10);
    return 2.0 * total;
}

kernel_moments moments(const kernel_spec& spec) {
    return {l1_norm(spec), second_moment_near_zero(spec)};
}

double nu0_lower_bound(const kernel_spec& spec, const domain& dom) {
    if (!is_integrable(spec))
        throw config_error("kernel: nu0 is defined for integrable families only");
    const double l1 = l1_norm(spec);

    // Signed cumulative mass F(t) = integral of the density over [0, t].
    const auto cumulative = [&](double t) {
        return t >= 0.0 ? integrate_density(spec, 0.0, t) : -integrate_density(spec, 0.0, -t);
    };
    const auto exterior_mass = [&](double x) {
        double inside = 0.0;
        for (const interval& iv : dom.intervals())
            inside += cumulative(iv.b - x) - cumulative(iv.a - x);
        return l1 - inside;
    };

    double best = inf;
    constexpr int samples_per_interval = 4097;
    for (const interval& iv : dom.intervals()) {
        for (int i = 0; i <= samples_per_interval; ++i) {
            const double x = iv.a + (iv.b - iv.a) * i / samples_per_interval;
            best = std::min(best, exterior_mass(x));
        }
    }
    if (!(best > 0.0))
        throw internal_error("kernel: exterior-mass lower bound came out nonpositive; "
                             "the kernel/domain pair violates the standing assumption");
    return best;
}

} // namespace nonloc
