#pragma once

#include <nonloc/domain.hpp>

#include <span>
#include <vector>

namespace nonloc {

enum class node_class { interior, boundary, exterior };

/// Uniform grid over the padded bounding box of the domain, fitted so that
/// every interval endpoint coincides with a node exactly.
class grid {
public:
    /// Picks the spacing h <= h_target that divides every interval length and
    /// gap: h = g/n where g is the common measure of all endpoint offsets and
    /// n = round(g/h_target) when that division is exact, otherwise the next
    /// power of two >= g/h_target. The pad is the smallest multiple of h that
    /// covers truncation_radius.
    static grid build(domain dom, double h_target, double truncation_radius);

    double h() const { return h_; }
    int size() const { return static_cast<int>(classes_.size()); }
    double x(int i) const { return origin_ + h_ * i; }
    node_class cls(int i) const { return classes_[i]; }

    /// Node indices in the closure of Omega, in increasing order.
    std::span<const int> omega_bar() const { return omega_bar_; }
    /// Pad width in cells; also the largest usable convolution offset.
    int pad_cells() const { return pad_cells_; }
    const domain& dom() const { return dom_; }

    /// Exact node lookup; throws if x is not a node (1e-9*h tolerance).
    int index_of(double x) const;
    double distance(int i) const { return dom_.signed_distance(x(i)); }

private:
    grid(domain dom, double origin, double h, int n, int pad_cells);

    domain dom_;
    double origin_;
    double h_;
    int pad_cells_;
    std::vector<node_class> classes_;
    std::vector<int> omega_bar_;
};

} // namespace nonloc
