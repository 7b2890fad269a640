#include <nonloc/grid.hpp>

#include <nonloc/errors.hpp>

#include <cmath>
#include <string>

namespace nonloc {
namespace {

// Common measure of a set of positive lengths, with a fuzzy Euclid step so
// endpoint data that is exact up to 1e-12 still yields an exact fit.
double fuzzy_gcd(double a, double b) {
    const double tol = 1e-9 * std::max(a, b);
    while (b > tol) {
        const double r = std::fmod(a, b);
        a = b;
        b = (r < tol || b - r < tol) ? 0.0 : r;
    }
    return a;
}

} // namespace

grid grid::build(domain dom, double h_target, double truncation_radius) {
    if (h_target <= 0.0) throw config_error("grid: h_target must be positive");
    if (truncation_radius <= 0.0) throw config_error("grid: truncation radius must be positive");

    // Common measure of all endpoint offsets from the leftmost endpoint.
    double g = 0.0;
    const double x0 = dom.min_endpoint();
    for (const interval& iv : dom.intervals()) {
        for (double e : {iv.a, iv.b}) {
            const double off = e - x0;
            if (off <= 0.0) continue;
            g = (g == 0.0) ? off : fuzzy_gcd(std::max(g, off), std::min(g, off));
        }
    }
    if (g <= 0.0) throw config_error("grid: degenerate endpoint set");
    for (const interval& iv : dom.intervals()) {
        for (double e : {iv.a, iv.b}) {
            const double off = (e - x0) / g;
            if (std::abs(off - std::round(off)) > 1e-9)
                throw config_error("grid: interval endpoints are incommensurable; "
                                   "snap endpoints to a common spacing (1e-12) and retry");
        }
    }

    const double ratio = g / h_target;
    int n;
    if (std::abs(ratio - std::round(ratio)) < 1e-9 && std::round(ratio) >= 1.0) {
        n = static_cast<int>(std::round(ratio));
    } else {
        n = 1;
        while (n < ratio) n *= 2;
    }
    const double h = g / n;

    const int pad_cells = static_cast<int>(std::ceil(truncation_radius / h - 1e-12));
    const int inner = static_cast<int>(std::round((dom.max_endpoint() - x0) / h));
    const double origin = x0 - pad_cells * h;
    return grid(std::move(dom), origin, h, inner + 2 * pad_cells + 1, pad_cells);
}

grid::grid(domain dom, double origin, double h, int n, int pad_cells)
    : dom_(std::move(dom)), origin_(origin), h_(h), pad_cells_(pad_cells) {
    classes_.resize(n);
    for (int i = 0; i < n; ++i) {
        const double xi = x(i);
        if (dom_.on_boundary(xi, 1e-9 * h_))
            classes_[i] = node_class::boundary;
        else if (dom_.contains(xi))
            classes_[i] = node_class::interior;
        else
            classes_[i] = node_class::exterior;
        if (classes_[i] != node_class::exterior) omega_bar_.push_back(i);
    }
}

int grid::index_of(double x_query) const {
    const double pos = (x_query - origin_) / h_;
    const long i = std::lround(pos);
    if (i < 0 || i >= size() || std::abs(pos - static_cast<double>(i)) > 1e-9)
        throw config_error("grid: " + std::to_string(x_query) + " is not a grid node");
    return static_cast<int>(i);
}

} // namespace nonloc
