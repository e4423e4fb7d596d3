#pragma once

#include <cmath>
#include <cstddef>
#include <istream>
#include <sstream>
#include <string>
#include <vector>

#include "tdabands/errors.hpp"
#include "tdabands/format.hpp"

namespace tdabands {

// Finite point set in Euclidean space, flat row-major storage.
struct PointCloud {
    std::vector<double> coords;
    int dim = 0;

    std::size_t size() const { return dim == 0 ? 0 : coords.size() / dim; }
    const double* point(std::size_t i) const { return coords.data() + i * dim; }

    double distance(std::size_t i, std::size_t j) const {
        const double* a = point(i);
        const double* b = point(j);
        double sq = 0.0;
        for (int c = 0; c < dim; ++c) {
            const double diff = a[c] - b[c];
            sq += diff * diff;
        }
        return std::sqrt(sq);
    }
};

inline PointCloud make_point_cloud(const std::vector<std::vector<double>>& points) {
    if (points.empty()) throw ValidationError("point cloud: must be non-empty");
    PointCloud cloud;
    cloud.dim = static_cast<int>(points.front().size());
    if (cloud.dim < 1) throw ValidationError("point cloud: dimension must be >= 1");
    cloud.coords.reserve(points.size() * cloud.dim);
    for (std::size_t i = 0; i < points.size(); ++i) {
        if (static_cast<int>(points[i].size()) != cloud.dim)
            throw ValidationError("point cloud: point " + std::to_string(i) + " has dimension " +
                                  std::to_string(points[i].size()) + ", expected " +
                                  std::to_string(cloud.dim));
        cloud.coords.insert(cloud.coords.end(), points[i].begin(), points[i].end());
    }
    return cloud;
}

// CSV: one point per row, comma-separated coordinates, `#` comments ignored.
inline PointCloud parse_point_cloud(std::istream& in) {
    std::vector<std::vector<double>> points;
    std::string line;
    long lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::string_view body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        const std::string where = "line " + std::to_string(lineno);
        auto fields = split_csv(body);
        std::vector<double> pt;
        pt.reserve(fields.size());
        for (auto f : fields) pt.push_back(parse_double(f, where));
        if (!points.empty() && pt.size() != points.front().size())
            throw ValidationError(where + ": point has " + std::to_string(pt.size()) +
                                  " coordinates, expected " +
                                  std::to_string(points.front().size()));
        points.push_back(std::move(pt));
    }
    return make_point_cloud(points);
}

inline PointCloud parse_point_cloud(const std::string& text) {
    std::istringstream in(text);
    return parse_point_cloud(in);
}

inline PointCloud subset(const PointCloud& cloud, const std::vector<std::size_t>& indices) {
    PointCloud out;
    out.dim = cloud.dim;
    out.coords.reserve(indices.size() * cloud.dim);
    for (std::size_t i : indices)
        out.coords.insert(out.coords.end(), cloud.point(i), cloud.point(i) + cloud.dim);
    return out;
}

} // namespace tdabands
