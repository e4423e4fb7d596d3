#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "tdabands/diagram.hpp"
#include "tdabands/errors.hpp"
#include "tdabands/point_cloud.hpp"

namespace tdabands {

// Simplex of dimension <= 2: vertices sorted ascending, unused slots -1.
struct Simplex {
    std::array<int, 3> vertices{-1, -1, -1};
    int dim = 0;
    double value = 0.0; // Rips filtration value = diameter of the vertex set
};

// Simplices sorted by (value, dimension, lexicographic vertices). The order
// refines face-before-coface and pins down every tie, so reduction output is
// deterministic.
struct FilteredComplex {
    std::vector<Simplex> simplices;
    int num_vertices = 0;
};

inline bool simplex_order(const Simplex& a, const Simplex& b) {
    if (a.value != b.value) return a.value < b.value;
    if (a.dim != b.dim) return a.dim < b.dim;
    return a.vertices < b.vertices;
}

// Vietoris-Rips filtration up to max_dim (<= 2): a simplex enters at the
// maximum pairwise distance of its vertices; simplices of diameter beyond
// max_scale are not built.
inline FilteredComplex build_rips(const PointCloud& cloud, double max_scale, int max_dim) {
    if (cloud.size() == 0) throw ValidationError("rips: point cloud is empty");
    if (!(max_scale >= 0.0)) throw ValidationError("rips: max_scale must be >= 0");
    if (max_dim < 0 || max_dim > 2) throw ValidationError("rips: max_dim must be 0, 1 or 2");

    const int n = static_cast<int>(cloud.size());
    FilteredComplex complex;
    complex.num_vertices = n;
    for (int v = 0; v < n; ++v)
        complex.simplices.push_back({{v, -1, -1}, 0, 0.0});

    std::vector<double> dist; // upper-triangular pairwise distances
    std::vector<std::vector<int>> neighbors(n);
    if (max_dim >= 1) {
        dist.assign(static_cast<std::size_t>(n) * n, 0.0);
        for (int u = 0; u < n; ++u) {
            for (int v = u + 1; v < n; ++v) {
                const double d = cloud.distance(u, v);
                dist[static_cast<std::size_t>(u) * n + v] = d;
                if (d <= max_scale) {
                    complex.simplices.push_back({{u, v, -1}, 1, d});
                    neighbors[u].push_back(v);
                }
            }
        }
    }
    if (max_dim >= 2) {
        auto d_at = [&](int u, int v) { return dist[static_cast<std::size_t>(u) * n + v]; };
        for (int u = 0; u < n; ++u) {
            const auto& nb = neighbors[u];
            for (std::size_t a = 0; a < nb.size(); ++a) {
                for (std::size_t b = a + 1; b < nb.size(); ++b) {
                    const int v = nb[a], w = nb[b];
                    if (d_at(v, w) > max_scale) continue;
                    const double diameter = std::max({d_at(u, v), d_at(u, w), d_at(v, w)});
                    complex.simplices.push_back({{u, v, w}, 2, diameter});
                }
            }
        }
    }
    std::sort(complex.simplices.begin(), complex.simplices.end(), simplex_order);
    return complex;
}

namespace detail {

struct RawPair {
    double birth;
    double death; // +inf marks an essential class
};

// Union-find with the smallest vertex index as root: replicates the pairing
// the boundary-matrix reduction of the vertex-edge block produces.
class MinRootUnionFind {
public:
    explicit MinRootUnionFind(int n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }
    int find(int x) {
        int root = x;
        while (parent_[root] != root) root = parent_[root];
        while (parent_[x] != root) x = std::exchange(parent_[x], root);
        return root;
    }
    // Returns the root that dies (the larger one), or -1 if already joined.
    int merge(int a, int b) {
        const int ra = find(a), rb = find(b);
        if (ra == rb) return -1;
        const int dead = std::max(ra, rb);
        parent_[dead] = std::min(ra, rb);
        return dead;
    }

private:
    std::vector<int> parent_;
};

} // namespace detail

// Persistence of the filtration in dimensions 0 and 1 over the two-element
// field. H0 comes from a union-find sweep over the edges; H1 from column
// reduction of the triangle boundaries, where the pivot of a reduced column
// pairs its edge with the triangle. Both reproduce the standard full
// boundary-matrix reduction exactly.
inline std::map<int, Diagram> compute_persistence(const FilteredComplex& complex, double t_bound,
                                                  EssentialPolicy policy,
                                                  const std::set<int>& dims = {0, 1}) {
    if (!(t_bound > 0.0)) throw ValidationError("persistence: t_bound must be > 0");
    for (const auto& s : complex.simplices)
        if (s.value > t_bound)
            throw ValidationError("persistence: filtration value " + format_double(s.value) +
                                  " exceeds t_bound " + format_double(t_bound));
    for (int d : dims)
        if (d < 0 || d > 1)
            throw ValidationError("persistence: only dimensions 0 and 1 are computed");

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<detail::RawPair> h0, h1;

    // Edges in filtration order; vertex birth values for the H0 bars.
    std::vector<double> vertex_value(complex.num_vertices, 0.0);
    struct EdgeRef {
        int u, v;
        double value;
        bool positive = false;
    };
    std::vector<EdgeRef> edges;
    std::vector<const Simplex*> triangles;
    for (const auto& s : complex.simplices) {
        if (s.dim == 0) vertex_value[s.vertices[0]] = s.value;
        else if (s.dim == 1) edges.push_back({s.vertices[0], s.vertices[1], s.value});
        else triangles.push_back(&s);
    }

    detail::MinRootUnionFind uf(complex.num_vertices);
    for (auto& e : edges) {
        const int dead = uf.merge(e.u, e.v);
        if (dead < 0) e.positive = true; // creates a cycle
        else h0.push_back({vertex_value[dead], e.value});
    }
    for (int v = 0; v < complex.num_vertices; ++v)
        if (uf.find(v) == v) h0.push_back({vertex_value[v], inf});

    if (dims.count(1)) {
        // Edge ids in filtration order; only positive edges can end up as
        // pivots, but the reduction discovers that on its own.
        std::map<std::pair<int, int>, int> edge_id;
        for (std::size_t i = 0; i < edges.size(); ++i)
            edge_id[{edges[i].u, edges[i].v}] = static_cast<int>(i);

        std::vector<int> pivot_owner(edges.size(), -1);
        std::vector<std::vector<int>> columns(triangles.size());
        std::vector<int> scratch;
        for (std::size_t t = 0; t < triangles.size(); ++t) {
            const auto& v = triangles[t]->vertices;
            std::vector<int>& col = columns[t];
            col = {edge_id.at({v[0], v[1]}), edge_id.at({v[0], v[2]}), edge_id.at({v[1], v[2]})};
            std::sort(col.begin(), col.end());
            while (!col.empty()) {
                const int low = col.back();
                const int owner = pivot_owner[low];
                if (owner < 0) {
                    pivot_owner[low] = static_cast<int>(t);
                    h1.push_back({edges[low].value, triangles[t]->value});
                    break;
                }
                // Z/2 column addition: symmetric difference of sorted columns.
                scratch.clear();
                std::set_symmetric_difference(col.begin(), col.end(), columns[owner].begin(),
                                              columns[owner].end(), std::back_inserter(scratch));
                col.swap(scratch);
            }
        }
        for (std::size_t i = 0; i < edges.size(); ++i)
            if (edges[i].positive && pivot_owner[i] < 0) h1.push_back({edges[i].value, inf});
    }

    auto finalize = [&](std::vector<detail::RawPair>& raw, int dim) {
        std::vector<PersistencePair> pairs;
        pairs.reserve(raw.size());
        for (const auto& rp : raw) pairs.push_back({rp.birth, rp.death});
        return make_diagram(std::move(pairs), t_bound, dim, policy,
                            "persistence dim " + std::to_string(dim));
    };
    std::map<int, Diagram> out;
    if (dims.count(0)) out.emplace(0, finalize(h0, 0));
    if (dims.count(1)) out.emplace(1, finalize(h1, 1));
    return out;
}

} // namespace tdabands
