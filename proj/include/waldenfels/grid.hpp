#pragma once

#include <cmath>
#include <memory>
#include <optional>
#include <vector>

#include "waldenfels/common.hpp"
#include "waldenfels/geometry.hpp"

namespace waldenfels {

/// Uniform Cartesian grid, d in {1,2}, equal spacing on all axes.
struct Grid {
    int dim = 1;
    double h = 0;
    Vec lo{0, 0};
    std::array<int, 2> n{0, 1};  // nodes per axis; n[1] == 1 in 1D

    int num_nodes() const { return n[0] * n[1]; }
    int id(int ix, int iy = 0) const { return iy * n[0] + ix; }
    std::array<int, 2> multi_index(int id) const { return {id % n[0], id / n[0]}; }
    Vec coord(int id) const {
        const auto mi = multi_index(id);
        return {lo[0] + mi[0] * h, lo[1] + mi[1] * h};
    }
    bool in_range(int ix, int iy) const {
        return ix >= 0 && ix < n[0] && iy >= 0 && iy < n[1];
    }

    /// Grid covering [blo, bhi] with spacing h; end nodes land on the box
    /// corners when the box is commensurate with h.
    static Grid covering(int dim, Vec blo, Vec bhi, double h) {
        if (!(h > 0)) throw config_error("grid spacing must be > 0");
        Grid g;
        g.dim = dim;
        g.h = h;
        g.lo = blo;
        for (int j = 0; j < dim; ++j) {
            const double span = bhi[j] - blo[j];
            if (!(span > 0)) throw config_error("grid bounding box is empty");
            g.n[j] = static_cast<int>(std::floor(span / h + 1e-9)) + 1;
        }
        if (dim == 1) {
            g.n[1] = 1;
            g.lo[1] = 0;
        }
        return g;
    }
};

enum class NodeClass : unsigned char { Interior, ExteriorData, Outside };

/// Grid plus the set decomposition it carries: interior nodes (in the open set
/// D), exterior-data nodes (in closure(E) \ D, where prescribed data lives) and
/// nodes beyond E which take the constant far-field value. When E is the whole
/// space the computation is truncated at far_field_radius and that truncation
/// is reported with every result.
struct Domain {
    Grid grid;
    Region region_d;
    Region region_e;           // ignored when e_whole_space
    bool e_whole_space = true;
    double far_field_radius = 0;

    std::vector<NodeClass> node_class;
    std::vector<int> interior_nodes;        // node ids, row order
    std::vector<int> exterior_nodes;        // node ids, column order for coupling
    std::vector<int> interior_index;        // node id -> row or -1
    std::vector<int> exterior_index;        // node id -> column or -1

    int num_interior() const { return static_cast<int>(interior_nodes.size()); }
    int num_exterior() const { return static_cast<int>(exterior_nodes.size()); }

    double boundary_tol() const { return 1e-9 * grid.h; }

    bool e_closure_contains(const Vec& p) const {
        return e_whole_space || region_e.contains(p, grid.dim, boundary_tol());
    }

    /// Displacement set closure(E) - x realized for an interior site x.
    SupportMask mask_at(const Vec& x) const {
        if (e_whole_space) return SupportMask{Region::all()};
        Region shifted = region_e;
        shift_region(shifted, x);
        return SupportMask{shifted};
    }

  private:
    static void shift_region(Region& r, const Vec& x) {
        switch (r.kind) {
            case Region::Kind::All:
                return;
            case Region::Kind::Box:
                for (int j = 0; j < 2; ++j) { r.lo[j] -= x[j]; r.hi[j] -= x[j]; }
                return;
            case Region::Kind::Ball:
                for (int j = 0; j < 2; ++j) r.center[j] -= x[j];
                return;
            case Region::Kind::HalfSpace:
                r.offset -= dot(r.normal, x, 2);
                return;
            default:
                for (auto& p : r.parts) shift_region(p, x);
        }
    }
};

/// Partition every node into {interior, exterior-data, outside} by evaluating
/// the set predicates at node coordinates. D is treated as open, E as closed.
inline std::shared_ptr<const Domain> classify_nodes(const Grid& grid, const Region& d,
                                                    const Region& e, bool e_whole_space,
                                                    double far_field_radius) {
    auto dom = std::make_shared<Domain>();
    dom->grid = grid;
    dom->region_d = d;
    dom->region_e = e;
    dom->e_whole_space = e_whole_space;
    dom->far_field_radius = far_field_radius;

    const int n = grid.num_nodes();
    const double eps = dom->boundary_tol();
    dom->node_class.resize(n);
    dom->interior_index.assign(n, -1);
    dom->exterior_index.assign(n, -1);
    for (int id = 0; id < n; ++id) {
        const Vec x = grid.coord(id);
        if (d.contains(x, grid.dim, -eps)) {
            if (!e_whole_space && !e.contains(x, grid.dim, eps))
                throw config_error("domain configuration: D is not contained in E");
            dom->node_class[id] = NodeClass::Interior;
            dom->interior_index[id] = static_cast<int>(dom->interior_nodes.size());
            dom->interior_nodes.push_back(id);
        } else if (e_whole_space || e.contains(x, grid.dim, eps)) {
            dom->node_class[id] = NodeClass::ExteriorData;
            dom->exterior_index[id] = static_cast<int>(dom->exterior_nodes.size());
            dom->exterior_nodes.push_back(id);
        } else {
            dom->node_class[id] = NodeClass::Outside;
        }
    }
    if (dom->interior_nodes.size() < 3)
        throw config_error("resolution error: fewer than 3 interior nodes");
    if (!e_whole_space && dom->exterior_nodes.empty())
        throw config_error("domain configuration: E \\ D holds no nodes for exterior data");
    return dom;
}

/// 1D convenience: D = (a,b), E = whole space truncated at halo_width, grid on
/// [a - halo_width, b + halo_width].
inline std::shared_ptr<const Domain> build_interval_domain(double a, double b, double h,
                                                           double halo_width) {
    if (!(a < b)) throw config_error("interval domain requires a < b");
    if (!(h > 0)) throw config_error("grid spacing must be > 0");
    if (!(halo_width >= h)) throw config_error("halo width must be >= h");
    Grid g = Grid::covering(1, vec1(a - halo_width), vec1(b + halo_width), h);
    return classify_nodes(g, Region::interval(a, b), Region::all(), true, halo_width);
}

/// One real value per grid node; interior values are the unknowns, exterior
/// nodes carry prescribed data.
struct Field {
    std::shared_ptr<const Domain> domain;
    std::vector<double> values;
    std::optional<double> time;

    Field() = default;
    explicit Field(std::shared_ptr<const Domain> dom, double fill = 0.0)
        : domain(std::move(dom)), values(domain->grid.num_nodes(), fill) {}

    double& operator[](int id) { return values[id]; }
    double operator[](int id) const { return values[id]; }

    template <typename F>
    void fill(F&& f) {
        for (int id = 0; id < domain->grid.num_nodes(); ++id)
            values[id] = f(domain->grid.coord(id));
    }

    bool all_finite() const {
        for (double v : values)
            if (!std::isfinite(v)) return false;
        return true;
    }

    double max_interior() const {
        double m = -kInf;
        for (int id : domain->interior_nodes) m = std::max(m, values[id]);
        return m;
    }
    double min_interior() const {
        double m = kInf;
        for (int id : domain->interior_nodes) m = std::min(m, values[id]);
        return m;
    }
    double max_exterior() const {
        double m = -kInf;
        for (int id : domain->exterior_nodes) m = std::max(m, values[id]);
        return m;
    }
    double min_exterior() const {
        double m = kInf;
        for (int id : domain->exterior_nodes) m = std::min(m, values[id]);
        return m;
    }
};

}  // namespace waldenfels
