#pragma once

#include "degenmax/common.hpp"

#include <algorithm>
#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

namespace degenmax {

struct Interval {
    double x_lo = 0.0;
    double x_hi = 1.0;
};

struct Rectangle {
    double x_lo = 0.0;
    double x_hi = 1.0;
    double y_lo = 0.0;
    double y_hi = 1.0;
};

/// Lower boundary y = gamma(x) with its first two derivatives.
struct GraphFunction {
    std::function<double(double)> value;
    std::function<double(double)> slope;
    std::function<double(double)> curvature;
};

/// Region {y > gamma(x)} clipped to a box.
struct HalfGraph {
    Rectangle box;
    GraphFunction gamma;
};

class SpatialDomain {
public:
    using Geometry = std::variant<Interval, Rectangle, HalfGraph>;

    static SpatialDomain interval(double x_lo, double x_hi) {
        if (!(x_lo < x_hi)) fail(ErrorKind::Config, "interval requires x_lo < x_hi");
        return SpatialDomain(Interval{x_lo, x_hi});
    }

    static SpatialDomain rectangle(double x_lo, double x_hi, double y_lo, double y_hi) {
        if (!(x_lo < x_hi) || !(y_lo < y_hi)) {
            fail(ErrorKind::Config, "rectangle requires x_lo < x_hi and y_lo < y_hi");
        }
        return SpatialDomain(Rectangle{x_lo, x_hi, y_lo, y_hi});
    }

    static SpatialDomain half_graph(const Rectangle& box, GraphFunction gamma) {
        if (!(box.x_lo < box.x_hi) || !(box.y_lo < box.y_hi)) {
            fail(ErrorKind::Config, "half-graph box requires x_lo < x_hi and y_lo < y_hi");
        }
        if (!gamma.value || !gamma.slope) fail(ErrorKind::Config, "half-graph needs gamma and its slope");
        for (int k = 0; k <= 256; ++k) {
            const double x = box.x_lo + (box.x_hi - box.x_lo) * k / 256.0;
            const double g = gamma.value(x);
            if (!std::isfinite(g) || !(g < box.y_hi)) {
                fail(ErrorKind::Config, "gamma must stay finite and below y_hi, fails at x = " + format_double(x));
            }
        }
        return SpatialDomain(HalfGraph{box, std::move(gamma)});
    }

    int dim() const { return std::holds_alternative<Interval>(geometry_) ? 1 : 2; }

    const Geometry& geometry() const { return geometry_; }

    bool is_half_graph() const { return std::holds_alternative<HalfGraph>(geometry_); }

    /// Bounding box; for intervals the y-range is [0, 0].
    Rectangle bounding_box() const {
        if (const auto* i = std::get_if<Interval>(&geometry_)) return {i->x_lo, i->x_hi, 0.0, 0.0};
        if (const auto* r = std::get_if<Rectangle>(&geometry_)) return *r;
        return std::get<HalfGraph>(geometry_).box;
    }

    /// Membership in the closure, with slack tol.
    bool contains(const Vector& x, double tol = 1e-12) const {
        const Rectangle box = bounding_box();
        if (x[0] < box.x_lo - tol || x[0] > box.x_hi + tol) return false;
        if (dim() == 1) return true;
        if (x[1] < box.y_lo - tol || x[1] > box.y_hi + tol) return false;
        if (const auto* h = std::get_if<HalfGraph>(&geometry_)) {
            const double xc = std::clamp(x[0], box.x_lo, box.x_hi);
            return x[1] >= h->gamma.value(xc) - tol;
        }
        return true;
    }

    double diameter() const {
        const Rectangle box = bounding_box();
        return std::hypot(box.x_hi - box.x_lo, box.y_hi - box.y_lo);
    }

private:
    explicit SpatialDomain(Geometry g) : geometry_(std::move(g)) {}

    Geometry geometry_;
};

enum class NodeFlag { Interior, Boundary };

/// Which parts of the boundary a node lies on.
enum BoundarySide : unsigned {
    kNoSide = 0,
    kLeft = 1u << 0,
    kRight = 1u << 1,
    kBottom = 1u << 2,
    kTop = 1u << 3,
    kGraph = 1u << 4,
};

/// Uniform lattice restricted to the domain, nodes in lexicographic order (x fastest).
class Grid {
public:
    static Grid build(const SpatialDomain& domain, std::array<int, 2> cells) {
        Grid g(domain);
        const int d = domain.dim();
        if (cells[0] < 2 || (d == 2 && cells[1] < 2)) fail(ErrorKind::Config, "grid needs at least 2 cells per axis");
        if (d == 1) cells[1] = 0;
        g.cells_ = cells;
        const Rectangle box = domain.bounding_box();
        g.lo_ = {box.x_lo, box.y_lo};
        g.h_ = {(box.x_hi - box.x_lo) / cells[0], d == 2 ? (box.y_hi - box.y_lo) / cells[1] : 0.0};
        const int nx = cells[0] + 1;
        const int ny = d == 2 ? cells[1] + 1 : 1;
        g.index_.assign(static_cast<std::size_t>(nx) * ny, -1);
        const HalfGraph* hg = std::get_if<HalfGraph>(&domain.geometry());

        std::vector<int> first_row(nx, 0);
        if (hg) {
            for (int i = 0; i < nx; ++i) {
                const double x = g.lo_[0] + i * g.h_[0];
                const double gam = hg->gamma.value(x);
                int j0 = 0;
                while (j0 < ny && g.lo_[1] + j0 * g.h_[1] <= gam - 0.5 * g.h_[1]) ++j0;
                if (j0 >= ny - 1) fail(ErrorKind::Config, "graph leaves fewer than two grid rows at x = " + format_double(x));
                first_row[i] = j0;
            }
        }
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                if (j < first_row[i]) continue;
                unsigned sides = kNoSide;
                if (i == 0) sides |= kLeft;
                if (i == nx - 1) sides |= kRight;
                if (d == 2) {
                    if (j == ny - 1) sides |= kTop;
                    if (j == first_row[i]) {
                        const bool on_graph = hg && hg->gamma.value(g.lo_[0] + i * g.h_[0]) > g.lo_[1] - 0.5 * g.h_[1];
                        sides |= on_graph ? kGraph : kBottom;
                    }
                }
                Vector p(d);
                p[0] = g.lo_[0] + i * g.h_[0];
                if (d == 2) p[1] = g.lo_[1] + j * g.h_[1];
                g.index_[static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * j] = static_cast<long>(g.nodes_.size());
                g.nodes_.push_back(std::move(p));
                g.lattice_.push_back({i, j});
                g.sides_.push_back(sides);
            }
        }
        return g;
    }

    int dim() const { return domain_.dim(); }
    std::size_t size() const { return nodes_.size(); }
    const SpatialDomain& domain() const { return domain_; }
    const Vector& node(std::size_t i) const { return nodes_[i]; }
    const std::vector<Vector>& nodes() const { return nodes_; }
    std::array<int, 2> lattice(std::size_t i) const { return lattice_[i]; }
    unsigned sides(std::size_t i) const { return sides_[i]; }
    NodeFlag flag(std::size_t i) const { return sides_[i] == kNoSide ? NodeFlag::Interior : NodeFlag::Boundary; }
    bool is_boundary(std::size_t i) const { return sides_[i] != kNoSide; }
    std::array<int, 2> cells() const { return cells_; }
    std::array<double, 2> spacing() const { return h_; }
    double spacing(int axis) const { return h_[axis]; }

    double min_spacing() const { return dim() == 1 ? h_[0] : std::min(h_[0], h_[1]); }

    /// Node at lattice offset step (+1 or -1) along axis, if present.
    std::optional<std::size_t> neighbor(std::size_t n, int axis, int step) const {
        auto [i, j] = lattice_[n];
        if (axis == 0) i += step; else j += step;
        return at(i, j);
    }

    std::optional<std::size_t> at(int i, int j) const {
        const int nx = cells_[0] + 1;
        const int ny = dim() == 2 ? cells_[1] + 1 : 1;
        if (i < 0 || i >= nx || j < 0 || j >= ny) return std::nullopt;
        const long k = index_[static_cast<std::size_t>(i) + static_cast<std::size_t>(nx) * j];
        if (k < 0) return std::nullopt;
        return static_cast<std::size_t>(k);
    }

    std::vector<std::size_t> boundary_nodes() const {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < size(); ++i) if (is_boundary(i)) out.push_back(i);
        return out;
    }

    /// Unit inward normal at a boundary node; corners use the normalized sum of edge normals.
    Vector inward_normal(std::size_t n) const {
        const unsigned s = sides_[n];
        Vector v = Vector::Zero(dim());
        if (s & kLeft) v[0] += 1.0;
        if (s & kRight) v[0] -= 1.0;
        if (dim() == 2) {
            if (s & kBottom) v[1] += 1.0;
            if (s & kTop) v[1] -= 1.0;
            if (s & kGraph) {
                const auto& hg = std::get<HalfGraph>(domain_.geometry());
                const double slope = hg.gamma.slope(nodes_[n][0]);
                Vector g(2);
                g << -slope, 1.0;
                v += g / g.norm();
            }
        }
        const double len = v.norm();
        if (len == 0.0) fail(ErrorKind::Precondition, "no inward normal at node " + format_point(nodes_[n]));
        return v / len;
    }

private:
    explicit Grid(const SpatialDomain& d) : domain_(d) {}

    SpatialDomain domain_;
    std::array<int, 2> cells_{0, 0};
    std::array<double, 2> lo_{0.0, 0.0};
    std::array<double, 2> h_{0.0, 0.0};
    std::vector<Vector> nodes_;
    std::vector<std::array<int, 2>> lattice_;
    std::vector<unsigned> sides_;
    std::vector<long> index_;
};

}  // namespace degenmax
