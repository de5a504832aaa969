#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "plap/domain.hpp"

namespace plap {

enum class NodeClass : std::uint8_t { Exterior, Interior, Dirichlet };

/// Uniform Cartesian lattice over the bounding box of a domain, padded by one
/// node layer. Nodes are numbered with axis 0 varying fastest.
///
/// A node is interior when it lies in the open domain, Dirichlet when it lies
/// outside but shares a lattice cell with an interior node, and exterior
/// otherwise. Dirichlet nodes carry F evaluated at their boundary projection.
struct Grid {
    int dim = 0;
    int n = 0;  ///< nodes per unit length
    double spacing = 0.0;
    Vec origin;
    std::vector<int> dims;
    std::vector<std::int64_t> strides;
    std::vector<NodeClass> node_class;
    std::vector<double> dirichlet;  ///< boundary value at Dirichlet nodes, 0 elsewhere
    std::vector<std::int64_t> unknown_of;  ///< compact index of interior nodes, -1 otherwise
    std::vector<std::int64_t> unknowns;    ///< node id of each interior node
    Domain domain;
    BoundaryIndicator boundary;
    std::optional<double> mollify;

    std::int64_t node_count() const { return static_cast<std::int64_t>(node_class.size()); }
    std::int64_t interior_count() const { return static_cast<std::int64_t>(unknowns.size()); }
    std::int64_t dirichlet_count() const {
        return std::count(node_class.begin(), node_class.end(), NodeClass::Dirichlet);
    }

    std::vector<int> index_of(std::int64_t id) const {
        std::vector<int> m(dim);
        for (int a = 0; a < dim; ++a) {
            m[a] = static_cast<int>(id % dims[a]);
            id /= dims[a];
        }
        return m;
    }

    std::int64_t id_of(const std::vector<int>& m) const {
        std::int64_t id = 0;
        for (int a = 0; a < dim; ++a) id += m[a] * strides[a];
        return id;
    }

    Vec position(std::int64_t id) const {
        Vec x = origin;
        for (int a = 0; a < dim; ++a) {
            x[a] += spacing * static_cast<double>(id % dims[a]);
            id /= dims[a];
        }
        return x;
    }

    /// Boundary value as seen by the discretization at a boundary point (F,
    /// or its ramp when the grid was built with mollification).
    double boundary_value(const Vec& b) const { return mollify ? mollified_value(b) : boundary(b); }

    bool same_layout(const Grid& other) const {
        return dim == other.dim && dims == other.dims && spacing == other.spacing && origin == other.origin &&
               node_class == other.node_class;
    }

    std::function<double(const Vec&)> mollified_value;
};

/// Replaces F by min{1, dist(b, {F = 0}) / width} on {F = 1}, with the
/// distance measured against a boundary sample.
inline std::function<double(const Vec&)> make_mollified(const Domain& dom, const BoundaryIndicator& F, double width,
                                                        int n_samples = kDefaultBoundarySamples) {
    if (!(width > 0)) throw std::invalid_argument("mollification width must be positive");
    std::vector<Vec> zeros;
    for (const Vec& s : dom.sample_boundary(n_samples))
        if (!F.is_one(s)) zeros.push_back(s);
    return [F, width, zeros = std::move(zeros)](const Vec& b) {
        if (!F.is_one(b)) return 0.0;
        double dist = std::numeric_limits<double>::infinity();
        for (const Vec& z : zeros) dist = std::min(dist, (z - b).norm());
        return std::min(1.0, dist / width);
    };
}

inline Grid discretize(const Domain& dom, const BoundaryIndicator& F, int n, std::optional<double> mollify = {}) {
    if (n < 1) throw std::invalid_argument("nodes per unit length must be positive");
    if (!std::isfinite(dom.bbox.diameter())) throw std::invalid_argument("domain bounding box must be finite");
    Grid g;
    g.dim = dom.dim;
    g.n = n;
    g.spacing = 1.0 / n;
    g.domain = dom;
    g.boundary = F;
    g.mollify = mollify;
    if (mollify) g.mollified_value = make_mollified(dom, F, *mollify);
    g.origin = dom.bbox.lo - Vec::Constant(dom.dim, g.spacing);
    g.dims.resize(g.dim);
    g.strides.resize(g.dim);
    std::int64_t total = 1;
    for (int a = 0; a < g.dim; ++a) {
        const double extent = dom.bbox.hi[a] - dom.bbox.lo[a];
        g.dims[a] = static_cast<int>(std::ceil(extent * n - 1e-9)) + 3;
        g.strides[a] = total;
        total *= g.dims[a];
    }
    g.node_class.assign(total, NodeClass::Exterior);
    g.dirichlet.assign(total, 0.0);
    g.unknown_of.assign(total, -1);

    for (std::int64_t id = 0; id < total; ++id) {
        if (dom.inside(g.position(id))) {
            g.node_class[id] = NodeClass::Interior;
            g.unknown_of[id] = static_cast<std::int64_t>(g.unknowns.size());
            g.unknowns.push_back(id);
        }
    }
    if (g.unknowns.empty()) throw std::runtime_error("grid too coarse: no interior nodes");

    // Every node of the 3^d block around an interior node shares a cell with it.
    std::vector<int> offset(g.dim, -1);
    std::vector<std::int64_t> neighbour_offsets;
    while (true) {
        std::int64_t off = 0;
        for (int a = 0; a < g.dim; ++a) off += offset[a] * g.strides[a];
        if (off != 0) neighbour_offsets.push_back(off);
        int a = 0;
        while (a < g.dim && ++offset[a] == 2) offset[a++] = -1;
        if (a == g.dim) break;
    }
    for (std::int64_t id : g.unknowns) {
        for (std::int64_t off : neighbour_offsets) {
            const std::int64_t nb = id + off;
            if (g.node_class[nb] != NodeClass::Exterior) continue;
            g.node_class[nb] = NodeClass::Dirichlet;
            g.dirichlet[nb] = g.boundary_value(dom.boundary_project(g.position(nb)));
        }
    }
    return g;
}

}  // namespace plap
