#pragma once

#include <span>
#include <vector>

namespace nonloc {

/// Linear correlation with a centered window:
/// out[i] = sum_{k=0}^{2K} w[k] * u[i + k - K], out-of-range reads are zero.
/// Implemented with zero-padded real FFTs sized to avoid wraparound.
std::vector<double> correlate_centered(std::span<const double> u,
                                       std::span<const double> w_centered);

} // namespace nonloc
