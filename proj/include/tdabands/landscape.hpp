#pragma once

#include <algorithm>
#include <functional>
#include <vector>

#include "tdabands/diagram.hpp"
#include "tdabands/grid.hpp"
#include "tdabands/summary.hpp"

namespace tdabands {

// Tent function of a persistence pair: rises from (birth, 0) to the peak
// (midpoint, height), falls back to (death, 0), zero elsewhere.
inline double triangle(const PersistencePair& p, double t) {
    if (t <= p.birth || t >= p.death) return 0.0;
    return std::min(t - p.birth, p.death - t);
}

namespace detail {

// k-th largest triangle value at t over the diagram's multiset of pairs.
// `scratch` avoids per-call allocation on grid sweeps.
inline double kth_triangle_value(const Diagram& d, int k, double t, std::vector<double>& scratch) {
    if (static_cast<int>(d.pairs.size()) < k) return 0.0;
    scratch.clear();
    for (const auto& p : d.pairs) scratch.push_back(triangle(p, t));
    std::nth_element(scratch.begin(), scratch.begin() + (k - 1), scratch.end(),
                     std::greater<double>());
    return scratch[k - 1];
}

} // namespace detail

inline double landscape_at(const Diagram& d, int k, double t) {
    if (k < 1) throw ValidationError("landscape: k must be >= 1");
    std::vector<double> scratch;
    return detail::kth_triangle_value(d, k, t, scratch);
}

inline SummaryFunction landscape_on_grid(const Diagram& d, int k, const Grid& grid) {
    if (k < 1) throw ValidationError("landscape: k must be >= 1");
    if (grid.t_max > d.t_bound)
        throw ValidationError("landscape: grid t_max " + format_double(grid.t_max) +
                              " exceeds diagram t_bound " + format_double(d.t_bound));
    std::vector<double> values(grid.resolution);
    std::vector<double> scratch;
    scratch.reserve(d.pairs.size());
    for (int j = 0; j < grid.resolution; ++j)
        values[j] = detail::kth_triangle_value(d, k, grid.node(j), scratch);
    return make_summary(grid, std::move(values), SummaryKind::landscape(k));
}

} // namespace tdabands
