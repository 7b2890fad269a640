#include <nonloc/domain.hpp>

#include <nonloc/errors.hpp>

#include <algorithm>
#include <cmath>
#include <limits>

namespace nonloc {

domain::domain(std::vector<interval> intervals) : intervals_(std::move(intervals)) {
    if (intervals_.empty())
        throw config_error("domain: at least one interval required");
    std::sort(intervals_.begin(), intervals_.end(),
              [](const interval& l, const interval& r) { return l.a < r.a; });
    for (const interval& iv : intervals_) {
        if (!(iv.a < iv.b))
            throw config_error("domain: interval has non-positive length");
    }
    for (std::size_t i = 1; i < intervals_.size(); ++i) {
        if (!(intervals_[i].a > intervals_[i - 1].b))
            throw config_error("domain: intervals must be disjoint with positive gaps");
    }
    diameter_ = intervals_.back().b - intervals_.front().a;
}

double domain::signed_distance(double x) const {
    double dist_boundary = std::numeric_limits<double>::infinity();
    for (const interval& iv : intervals_) {
        dist_boundary = std::min(dist_boundary, std::abs(x - iv.a));
        dist_boundary = std::min(dist_boundary, std::abs(x - iv.b));
    }
    return contains(x) ? dist_boundary : -dist_boundary;
}

bool domain::contains(double x) const {
    for (const interval& iv : intervals_)
        if (x > iv.a && x < iv.b) return true;
    return false;
}

bool domain::contains_closure(double x) const {
    for (const interval& iv : intervals_)
        if (x >= iv.a && x <= iv.b) return true;
    return false;
}

bool domain::on_boundary(double x, double tol) const {
    for (const interval& iv : intervals_)
        if (std::abs(x - iv.a) <= tol || std::abs(x - iv.b) <= tol) return true;
    return false;
}

bool domain::in_strip(double x, double r) const {
    return contains(x) && signed_distance(x) < r;
}

double domain::max_interior_distance() const {
    double best = 0.0;
    for (const interval& iv : intervals_)
        best = std::max(best, 0.5 * (iv.b - iv.a));
    return best;
}

} // namespace nonloc
