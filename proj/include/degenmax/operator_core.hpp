#pragma once

#include "degenmax/coefficients.hpp"
#include "degenmax/common.hpp"
#include "degenmax/domain.hpp"

#include <algorithm>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace degenmax {

enum class NodeClass { Interior, Degenerate, NonDegenerate };

struct BoundaryClassification {
    std::vector<std::size_t> degenerate_nodes;
    std::vector<std::size_t> nondegenerate_nodes;
    /// Per node; Interior for non-boundary nodes.
    std::vector<NodeClass> node_class;
    /// Per node; empty vectors for interior nodes.
    std::vector<Vector> inward_normals;
    double tol_zero = 0.0;

    bool is_degenerate(std::size_t n) const { return node_class[n] == NodeClass::Degenerate; }
    bool is_nondegenerate(std::size_t n) const { return node_class[n] == NodeClass::NonDegenerate; }
};

struct ClassifyOptions {
    std::optional<double> tol_zero;
    /// Times at which a is probed; a node must classify the same way at all of them.
    std::vector<double> times{0.0};
};

/// Point on the true boundary associated with a boundary node; graph nodes are projected onto the graph.
inline Vector boundary_point(const Grid& grid, std::size_t n) {
    Vector x = grid.node(n);
    if ((grid.sides(n) & kGraph) && grid.domain().is_half_graph()) {
        const auto& hg = std::get<HalfGraph>(grid.domain().geometry());
        x[1] = hg.gamma.value(x[0]);
    }
    return x;
}

namespace detail {

inline Matrix eval_a(const CoefficientField& f, double t, const Vector& x) {
    Matrix a;
    try {
        a = f.a(t, x);
    } catch (const std::exception& e) {
        fail(ErrorKind::Classification, "coefficient evaluation failed at " + format_point(x) + ": " + e.what());
    }
    if (!a.allFinite()) fail(ErrorKind::Classification, "coefficient a is not finite at " + format_point(x));
    return a;
}

}  // namespace detail

/// Splits boundary nodes into degenerate and non-degenerate sets.
///
/// A node is degenerate when the spectral norm of a along the inward ray,
/// sampled at h, h/2, h/4 and Richardson-extrapolated to distance 0, is below tol_zero.
inline BoundaryClassification classify_boundary(const Grid& grid, const CoefficientField& coeffs,
                                                const ClassifyOptions& options = {}) {
    if (coeffs.dim != grid.dim()) fail(ErrorKind::Precondition, "coefficient and grid dimensions differ");
    if (options.times.empty()) fail(ErrorKind::Precondition, "at least one probe time required");
    BoundaryClassification out;
    const std::size_t n_nodes = grid.size();
    out.node_class.assign(n_nodes, NodeClass::Interior);
    out.inward_normals.assign(n_nodes, Vector());

    if (options.tol_zero) {
        out.tol_zero = *options.tol_zero;
    } else {
        double amax = 0.0;
        for (double t : options.times) {
            for (std::size_t i = 0; i < n_nodes; ++i) {
                amax = std::max(amax, spectral_norm(detail::eval_a(coeffs, t, grid.node(i))));
            }
        }
        out.tol_zero = 1e-8 * std::max(1.0, amax);
    }

    const double h = grid.min_spacing();
    for (std::size_t i = 0; i < n_nodes; ++i) {
        if (!grid.is_boundary(i)) continue;
        const Vector n = grid.inward_normal(i);
        const Vector x0 = boundary_point(grid, i);
        out.inward_normals[i] = n;
        std::optional<bool> degenerate;
        for (double t : options.times) {
            const double f1 = spectral_norm(detail::eval_a(coeffs, t, x0 + h * n));
            const double f2 = spectral_norm(detail::eval_a(coeffs, t, x0 + 0.5 * h * n));
            const double f4 = spectral_norm(detail::eval_a(coeffs, t, x0 + 0.25 * h * n));
            const double limit = (8.0 * f4 - 6.0 * f2 + f1) / 3.0;
            const bool deg = std::abs(limit) < out.tol_zero;
            if (degenerate && *degenerate != deg) {
                fail(ErrorKind::Classification,
                     "node " + format_point(x0) + " changes type between probe times");
            }
            degenerate = deg;
        }
        if (*degenerate) {
            out.node_class[i] = NodeClass::Degenerate;
            out.degenerate_nodes.push_back(i);
        } else {
            out.node_class[i] = NodeClass::NonDegenerate;
            out.nondegenerate_nodes.push_back(i);
        }
    }
    return out;
}

/// Divergence row vector (sum_j d a^{kj} / d x_j)_k at x.
inline Vector divergence_of_a(const CoefficientField& coeffs, const Grid& grid, const Vector& x, double t,
                              double h_fd) {
    const int d = coeffs.dim;
    Vector div = Vector::Zero(d);
    if (coeffs.da) {
        const std::vector<Matrix> da = coeffs.da(t, x);
        for (int k = 0; k < d; ++k)
            for (int j = 0; j < d; ++j) div[k] += da[j](k, j);
        return div;
    }
    const SpatialDomain& dom = grid.domain();
    for (int j = 0; j < d; ++j) {
        Vector e = Vector::Zero(d);
        e[j] = h_fd;
        Matrix dj;
        if (dom.contains(x + e) && dom.contains(x - e)) {
            dj = (coeffs.a(t, x + e) - coeffs.a(t, x - e)) / (2.0 * h_fd);
        } else if (dom.contains(x + 2.0 * e)) {
            dj = (-3.0 * coeffs.a(t, x) + 4.0 * coeffs.a(t, x + e) - coeffs.a(t, x + 2.0 * e)) / (2.0 * h_fd);
        } else if (dom.contains(x - 2.0 * e)) {
            dj = (3.0 * coeffs.a(t, x) - 4.0 * coeffs.a(t, x - e) + coeffs.a(t, x - 2.0 * e)) / (2.0 * h_fd);
        } else {
            fail(ErrorKind::Precondition, "finite-difference stencil for da leaves the domain at " + format_point(x));
        }
        for (int k = 0; k < d; ++k) div[k] += dj(k, j);
    }
    return div;
}

/// Fichera function sum_k (b^k - sum_j d a^{kj}/d x_j) n_k at a degenerate node.
inline double fichera_function(const CoefficientField& coeffs, const BoundaryClassification& cls, const Grid& grid,
                               std::size_t node, double t = 0.0) {
    if (node >= grid.size() || !cls.is_degenerate(node)) {
        fail(ErrorKind::Precondition, "Fichera function requested at a non-degenerate node");
    }
    const Vector x = boundary_point(grid, node);
    const Vector& n = cls.inward_normals[node];
    const Vector drift = coeffs.b(t, x) - divergence_of_a(coeffs, grid, x, t, grid.min_spacing() / 4.0);
    return drift.dot(n);
}

struct LipschitzEstimate {
    double K = 0.0;
    bool non_lipschitz = false;
    std::vector<double> distances;
    /// Sup over degenerate nodes of ||a|| / distance at each ladder level.
    std::vector<double> level_ratios;
};

inline LipschitzEstimate estimate_boundary_lipschitz(const CoefficientField& coeffs, const BoundaryClassification& cls,
                                                     const Grid& grid, double probe_depth, double t = 0.0) {
    if (cls.degenerate_nodes.empty()) fail(ErrorKind::Precondition, "no degenerate boundary nodes");
    if (!(probe_depth > 0.0)) fail(ErrorKind::Precondition, "probe_depth must be positive");
    LipschitzEstimate est;
    for (int k = 0; k <= 10; ++k) {
        const double s = probe_depth * std::ldexp(1.0, -k);
        double sup = 0.0;
        for (std::size_t node : cls.degenerate_nodes) {
            const Vector x = boundary_point(grid, node) + s * cls.inward_normals[node];
            sup = std::max(sup, spectral_norm(detail::eval_a(coeffs, t, x)) / s);
        }
        est.distances.push_back(s);
        est.level_ratios.push_back(sup);
        est.K = std::max(est.K, sup);
    }
    bool increasing = true;
    for (std::size_t k = 1; k < est.level_ratios.size(); ++k) {
        if (!(est.level_ratios[k] > est.level_ratios[k - 1])) increasing = false;
    }
    est.non_lipschitz = increasing && est.level_ratios.back() > 2.0 * est.level_ratios.front();
    return est;
}

/// -u_t - tr(a D^2 u) - <b, Du> + c u; the u_t term only for parabolic fields.
inline double apply_operator(const CoefficientField& coeffs, const ScalarField& u, const Vector& x, double t = 0.0) {
    const Matrix a = coeffs.a(t, x);
    const double second = (a.array() * u.hessian(t, x).array()).sum();
    double out = -second - coeffs.b(t, x).dot(u.gradient(t, x)) + coeffs.c(t, x) * u.value(t, x);
    if (coeffs.parabolic && u.time_derivative) out -= u.time_derivative(t, x);
    return out;
}

struct SecondDerivativeOptions {
    double s0 = 0.0;  ///< Largest ladder distance; 0 selects a quarter of the domain extent.
    int levels = 12;
    /// Caller asserts that 1/theta is not integrable at 0; enables normal pairs.
    bool divergence_asserted = false;
};

struct PairLadder {
    std::string pair;  ///< "tt", "tn" or "nn" in the local tangent/normal frame.
    bool normal_pair = false;
    std::vector<double> distances;
    std::vector<double> values;
    bool decays = false;
};

struct SecondDerivativeReport {
    std::vector<PairLadder> pairs;
    bool all_decay = true;
};

/// Ladder of theta(s) times second differences of u along inward rays from degenerate nodes.
inline SecondDerivativeReport check_second_derivative_vanishing(const std::function<double(const Vector&)>& u,
                                                                const BoundaryClassification& cls, const Grid& grid,
                                                                const std::function<double(double)>& theta,
                                                                const SecondDerivativeOptions& options = {}) {
    if (options.levels < 4) fail(ErrorKind::Precondition, "ladder needs at least 4 levels");
    if (cls.degenerate_nodes.empty()) fail(ErrorKind::Precondition, "no degenerate boundary nodes");
    if (theta(0.0) != 0.0) fail(ErrorKind::Precondition, "theta(0) must be 0");
    const Rectangle box = grid.domain().bounding_box();
    const double extent = grid.dim() == 1 ? box.x_hi - box.x_lo : std::min(box.x_hi - box.x_lo, box.y_hi - box.y_lo);
    const double s0 = options.s0 > 0.0 ? options.s0 : 0.25 * extent;
    const int d = grid.dim();

    struct Dir {
        std::string name;
        bool normal;
    };
    std::vector<Dir> dirs;
    if (d == 2) dirs.push_back({"tt", false});
    if (options.divergence_asserted) {
        if (d == 2) dirs.push_back({"tn", true});
        dirs.push_back({"nn", true});
    }
    SecondDerivativeReport report;
    for (const Dir& dir : dirs) {
        PairLadder ladder;
        ladder.pair = dir.name;
        ladder.normal_pair = dir.normal;
        for (int k = 0; k < options.levels; ++k) {
            const double s = s0 * std::ldexp(1.0, -k);
            const double hs = 0.25 * s;
            double worst = 0.0;
            for (std::size_t node : cls.degenerate_nodes) {
                const Vector& n = cls.inward_normals[node];
                Vector tan = Vector::Zero(d);
                if (d == 2) tan << -n[1], n[0];
                const Vector x = boundary_point(grid, node) + s * n;
                double second = 0.0;
                if (dir.name == "nn") {
                    second = (u(x + hs * n) - 2.0 * u(x) + u(x - hs * n)) / (hs * hs);
                } else if (dir.name == "tt") {
                    second = (u(x + hs * tan) - 2.0 * u(x) + u(x - hs * tan)) / (hs * hs);
                } else {
                    second = (u(x + hs * (tan + n)) - u(x + hs * (tan - n)) - u(x - hs * (tan - n)) +
                              u(x - hs * (tan + n))) /
                             (4.0 * hs * hs);
                }
                const double v = theta(s) * second;
                if (std::abs(v) > std::abs(worst)) worst = v;
            }
            ladder.distances.push_back(s);
            ladder.values.push_back(worst);
        }
        const std::size_t m = ladder.values.size();
        const double v1 = std::abs(ladder.values[m - 3]);
        const double v2 = std::abs(ladder.values[m - 2]);
        const double v3 = std::abs(ladder.values[m - 1]);
        const double scale = std::max({1.0, v1, std::abs(ladder.values.front())});
        const bool all_zero = std::max({v1, v2, v3}) <= 1e-9 * scale;
        ladder.decays = all_zero || (v3 < v2 && v2 < v1);
        report.all_decay = report.all_decay && ladder.decays;
        report.pairs.push_back(std::move(ladder));
    }
    return report;
}

}  // namespace degenmax
