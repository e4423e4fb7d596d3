#pragma once

#include <cmath>
#include <limits>
#include <vector>

#include "tdabands/diagram.hpp"
#include "tdabands/grid.hpp"
#include "tdabands/landscape.hpp"
#include "tdabands/summary.hpp"

namespace tdabands {

struct SilhouetteParams {
    double power = 1.0; // 0 < p <= +inf

    SilhouetteParams() = default;
    explicit SilhouetteParams(double p) : power(p) {
        if (!(p > 0.0)) throw ValidationError("silhouette: power must be > 0");
    }
    bool infinite() const { return std::isinf(power); }
};

namespace detail {

// Normalized weights persistence^p. Computed in log space and shifted by the
// max so the largest weight is exactly 1; large p cannot overflow. For
// p = inf the weight is 1 on the maximal-persistence pairs and 0 elsewhere.
inline std::vector<double> silhouette_weights(const Diagram& d, const SilhouetteParams& params) {
    const std::size_t m = d.pairs.size();
    std::vector<double> w(m, 0.0);
    if (m == 0) return w;
    if (params.infinite()) {
        double max_pers = 0.0;
        for (const auto& p : d.pairs) max_pers = std::max(max_pers, p.persistence());
        for (std::size_t j = 0; j < m; ++j)
            if (d.pairs[j].persistence() == max_pers) w[j] = 1.0;
        return w;
    }
    std::vector<double> logs(m);
    double max_log = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < m; ++j) {
        logs[j] = params.power * std::log(d.pairs[j].persistence());
        max_log = std::max(max_log, logs[j]);
    }
    for (std::size_t j = 0; j < m; ++j) w[j] = std::exp(logs[j] - max_log);
    return w;
}

inline double weighted_average_at(const Diagram& d, const std::vector<double>& w, double t) {
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < d.pairs.size(); ++j) {
        num += w[j] * triangle(d.pairs[j], t);
        den += w[j];
    }
    return den == 0.0 ? 0.0 : num / den;
}

} // namespace detail

// Power-weighted silhouette: persistence^p-weighted average of the triangle
// functions. An empty diagram yields the zero function, matching the
// empty-diagram convention of the landscape.
inline double silhouette_at(const Diagram& d, const SilhouetteParams& params, double t) {
    if (d.pairs.empty()) return 0.0;
    const auto w = detail::silhouette_weights(d, params);
    return detail::weighted_average_at(d, w, t);
}

inline SummaryFunction silhouette_on_grid(const Diagram& d, const SilhouetteParams& params,
                                          const Grid& grid) {
    if (grid.t_max > d.t_bound)
        throw ValidationError("silhouette: grid t_max " + format_double(grid.t_max) +
                              " exceeds diagram t_bound " + format_double(d.t_bound));
    const auto w = detail::silhouette_weights(d, params);
    std::vector<double> values(grid.resolution);
    for (int j = 0; j < grid.resolution; ++j)
        values[j] = d.pairs.empty() ? 0.0 : detail::weighted_average_at(d, w, grid.node(j));
    return make_summary(grid, std::move(values), SummaryKind::silhouette(params.power));
}

} // namespace tdabands
