#pragma once

#include <cmath>
#include <vector>

#include "tdabands/errors.hpp"

namespace tdabands {

// Uniform evaluation grid on [t_min, t_max]. All summary functions exchanged
// between modules are sampled on one shared Grid.
struct Grid {
    double t_min = 0.0;
    double t_max = 1.0;
    int resolution = 2;

    Grid() = default;
    Grid(double tmin, double tmax, int res) : t_min(tmin), t_max(tmax), resolution(res) {
        if (!(t_min >= 0.0)) throw ValidationError("grid: t_min must be >= 0");
        if (!(t_min < t_max)) throw ValidationError("grid: t_min must be < t_max");
        if (resolution < 2) throw ValidationError("grid: resolution must be >= 2");
    }

    // std::lerp hits the endpoints exactly at j = 0 and j = resolution-1.
    double node(int j) const {
        return std::lerp(t_min, t_max, static_cast<double>(j) / (resolution - 1));
    }

    double step() const { return (t_max - t_min) / (resolution - 1); }

    std::vector<double> nodes() const {
        std::vector<double> out(resolution);
        for (int j = 0; j < resolution; ++j) out[j] = node(j);
        return out;
    }

    bool operator==(const Grid&) const = default;
};

} // namespace tdabands
