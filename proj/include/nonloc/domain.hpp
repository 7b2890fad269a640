#pragma once

#include <span>
#include <vector>

namespace nonloc {

struct interval {
    double a;
    double b;
};

/// Bounded open 1-D set: a finite union of disjoint open intervals.
///
/// The signed distance convention follows the usual one for exterior-data
/// problems: d(x) = dist(x, boundary) > 0 inside, d(x) <= 0 on the boundary
/// and outside.
class domain {
public:
    explicit domain(std::vector<interval> intervals);

    std::span<const interval> intervals() const { return intervals_; }
    double diameter() const { return diameter_; }
    double min_endpoint() const { return intervals_.front().a; }
    double max_endpoint() const { return intervals_.back().b; }

    double signed_distance(double x) const;
    bool contains(double x) const;          ///< open set membership
    bool contains_closure(double x) const;  ///< closure membership (endpoint-inclusive)
    bool on_boundary(double x, double tol = 1e-12) const;

    /// Strip membership test for Omega_r = { x in Omega : d(x) < r }.
    bool in_strip(double x, double r) const;

    /// Largest interior distance (half the widest interval).
    double max_interior_distance() const;

private:
    std::vector<interval> intervals_;
    double diameter_;
};

} // namespace nonloc
