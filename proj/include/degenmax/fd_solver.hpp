#pragma once

#include "degenmax/coefficients.hpp"
#include "degenmax/common.hpp"
#include "degenmax/domain.hpp"
#include "degenmax/operator_core.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <vector>

namespace degenmax {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Value field at (t, x).
using DataFn = std::function<double(double, const Vector&)>;

enum class RowKind { Interior, DegenerateBoundary, Dirichlet };

inline const char* to_string(RowKind k) {
    switch (k) {
        case RowKind::Interior: return "interior";
        case RowKind::DegenerateBoundary: return "degenerate_boundary";
        case RowKind::Dirichlet: return "dirichlet";
    }
    return "unknown";
}

/// First-order drift differencing. Only Upwind keeps the M-matrix property in general.
enum class DriftScheme { Upwind, Central, Downwind };

struct DiscreteOperator {
    SparseMatrix matrix;
    std::vector<RowKind> row_kind;
    Vector rhs;
    std::shared_ptr<const Grid> grid;
    std::vector<std::string> warnings;
};

struct AssemblyOptions {
    DriftScheme drift = DriftScheme::Upwind;
    double time = 0.0;
    /// Positive for one backward Euler step; adds 1/dt to the diagonal.
    double dt = 0.0;
    /// Previous (later-in-time) slice, used with dt > 0.
    const Vector* next_slice = nullptr;
};

namespace detail {

struct RowBuilder {
    std::vector<Eigen::Triplet<double>>& triplets;
    std::size_t row;
    double diag = 0.0;

    void add(std::size_t col, double v) {
        if (col == row) {
            diag += v;
        } else if (v != 0.0) {
            triplets.emplace_back(static_cast<int>(row), static_cast<int>(col), v);
        }
    }
};

inline std::size_t require(const Grid& grid, std::optional<std::size_t> n, std::size_t from) {
    if (!n) fail(ErrorKind::Precondition, "stencil leaves the grid at node " + format_point(grid.node(from)));
    return *n;
}

inline void add_drift(RowBuilder& row, const Grid& grid, std::size_t node, int axis, double bk, DriftScheme scheme,
                      bool boundary_row, std::vector<std::string>& warnings) {
    if (bk == 0.0) return;
    const double h = grid.spacing(axis);
    const auto plus = grid.neighbor(node, axis, +1);
    const auto minus = grid.neighbor(node, axis, -1);
    int dir = bk > 0.0 ? +1 : -1;
    if (scheme == DriftScheme::Downwind) dir = -dir;
    if (scheme == DriftScheme::Central && plus && minus) {
        row.add(*plus, -bk / (2.0 * h));
        row.add(*minus, bk / (2.0 * h));
        return;
    }
    if (boundary_row) {
        const bool has = dir > 0 ? bool(plus) : bool(minus);
        if (!has) {
            dir = -dir;
            warnings.push_back("drift points out of the domain along axis " + std::to_string(axis) +
                               " at degenerate node " + format_point(grid.node(node)));
        }
    }
    if (dir > 0) {
        const std::size_t p = require(grid, plus, node);
        row.add(p, -bk / h);
        row.add(node, bk / h);
    } else {
        const std::size_t m = require(grid, minus, node);
        row.add(node, -bk / h);
        row.add(m, bk / h);
    }
}

inline void add_diffusion(RowBuilder& row, const Grid& grid, std::size_t node, const Matrix& a) {
    const int d = grid.dim();
    for (int k = 0; k < d; ++k) {
        const double h = grid.spacing(k);
        const double w = a(k, k) / (h * h);
        row.add(require(grid, grid.neighbor(node, k, +1), node), -w);
        row.add(require(grid, grid.neighbor(node, k, -1), node), -w);
        row.add(node, 2.0 * w);
    }
    if (d == 2 && a(0, 1) != 0.0) {
        const auto [i, j] = grid.lattice(node);
        const double s = std::abs(a(0, 1)) / (grid.spacing(0) * grid.spacing(1));
        const int sj = a(0, 1) > 0.0 ? 1 : -1;
        row.add(node, -2.0 * s);
        row.add(require(grid, grid.at(i + 1, j), node), s);
        row.add(require(grid, grid.at(i - 1, j), node), s);
        row.add(require(grid, grid.at(i, j + 1), node), s);
        row.add(require(grid, grid.at(i, j - 1), node), s);
        row.add(require(grid, grid.at(i + 1, j + sj), node), -s);
        row.add(require(grid, grid.at(i - 1, j - sj), node), -s);
    }
}

/// Degenerate node whose drift leaves the grid along some axis while boundary data is available there.
inline bool outflow_corner(const Grid& grid, const BoundaryClassification& cls, std::size_t node, const Vector& b,
                           const DataFn& g, double t) {
    if (!cls.is_degenerate(node) || !g) return false;
    for (int k = 0; k < grid.dim(); ++k) {
        if (b[k] != 0.0 && !grid.neighbor(node, k, b[k] > 0.0 ? +1 : -1)) return std::isfinite(g(t, grid.node(node)));
    }
    return false;
}

}  // namespace detail

/// Assembles A_h u = f with Dirichlet rows on the non-degenerate boundary only.
///
/// Degenerate boundary rows discretize -<b, Du> + c u = f and never evaluate a.
inline DiscreteOperator assemble_elliptic(const CoefficientField& coeffs, const Grid& grid,
                                          const BoundaryClassification& cls, const DataFn& f, const DataFn& g,
                                          const AssemblyOptions& options = {}) {
    if (grid.domain().is_half_graph()) {
        fail(ErrorKind::Unsupported, "finite differences need a straightened domain; transform the half-graph first");
    }
    if (cls.node_class.size() != grid.size()) fail(ErrorKind::Precondition, "classification does not match grid");
    if (options.dt < 0.0) fail(ErrorKind::Precondition, "time step must be positive");
    if (options.dt > 0.0 && (!options.next_slice || options.next_slice->size() != static_cast<Eigen::Index>(grid.size()))) {
        fail(ErrorKind::Precondition, "time step requires the next slice");
    }
    const std::size_t n = grid.size();
    const double t = options.time;
    DiscreteOperator op;
    op.grid = std::make_shared<const Grid>(grid);
    op.row_kind.assign(n, RowKind::Interior);
    op.rhs = Vector::Zero(static_cast<Eigen::Index>(n));
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(n * 9);

    for (std::size_t i = 0; i < n; ++i) {
        const Vector& x = grid.node(i);
        if (cls.is_nondegenerate(i) || detail::outflow_corner(grid, cls, i, coeffs.b(t, x), g, t)) {
            op.row_kind[i] = RowKind::Dirichlet;
            const double gv = g ? g(t, x) : std::numeric_limits<double>::quiet_NaN();
            if (!std::isfinite(gv)) fail(ErrorKind::Config, "missing boundary data at " + format_point(x));
            triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), 1.0);
            op.rhs[static_cast<Eigen::Index>(i)] = gv;
            continue;
        }
        const bool degenerate = cls.is_degenerate(i);
        op.row_kind[i] = degenerate ? RowKind::DegenerateBoundary : RowKind::Interior;
        detail::RowBuilder row{triplets, i};
        const Vector b = coeffs.b(t, x);
        if (degenerate) {
            if (b.dot(cls.inward_normals[i]) <= 0.0) {
                op.warnings.push_back("b.n <= 0 at degenerate node " + format_point(x));
            }
        } else {
            detail::add_diffusion(row, grid, i, coeffs.a(t, x));
        }
        for (int k = 0; k < grid.dim(); ++k) {
            detail::add_drift(row, grid, i, k, b[k], options.drift, degenerate, op.warnings);
        }
        row.add(i, coeffs.c(t, x));
        double rhs = f ? f(t, x) : 0.0;
        if (options.dt > 0.0) {
            row.add(i, 1.0 / options.dt);
            rhs += (*options.next_slice)[static_cast<Eigen::Index>(i)] / options.dt;
        }
        triplets.emplace_back(static_cast<int>(i), static_cast<int>(i), row.diag);
        op.rhs[static_cast<Eigen::Index>(i)] = rhs;
    }
    op.matrix.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    op.matrix.setFromTriplets(triplets.begin(), triplets.end());
    op.matrix.makeCompressed();
    return op;
}

struct MMatrixReport {
    bool ok = true;
    std::vector<std::size_t> witnesses;
};

/// Positive diagonal, non-positive off-diagonals and non-negative row sums on non-Dirichlet rows.
inline MMatrixReport check_m_matrix(const DiscreteOperator& op) {
    MMatrixReport rep;
    for (Eigen::Index r = 0; r < op.matrix.outerSize(); ++r) {
        if (op.row_kind[static_cast<std::size_t>(r)] == RowKind::Dirichlet) continue;
        double diag = 0.0;
        double sum = 0.0;
        double scale = 0.0;
        bool bad = false;
        for (SparseMatrix::InnerIterator it(op.matrix, r); it; ++it) {
            sum += it.value();
            scale = std::max(scale, std::abs(it.value()));
            if (it.col() == r) {
                diag += it.value();
            } else if (it.value() > 0.0) {
                bad = true;
            }
        }
        if (!(diag > 0.0) || sum < -1e-12 * scale) bad = true;
        if (bad) {
            rep.ok = false;
            rep.witnesses.push_back(static_cast<std::size_t>(r));
        }
    }
    return rep;
}

struct SolveOptions {
    std::size_t direct_max_unknowns = 200000;
    double iterative_tol = 1e-10;
    int max_iterations = 20000;
};

struct SolveReport {
    Vector solution;
    double residual_norm = 0.0;
    bool m_matrix_ok = false;
    std::vector<std::size_t> m_matrix_witnesses;
    std::vector<std::size_t> max_principle_violations;
    std::optional<double> convergence_rate;
    std::string method;
    std::vector<std::string> warnings;
};

/// Forward Gauss-Seidel sweep as a preconditioner.
class GaussSeidelPreconditioner {
public:
    GaussSeidelPreconditioner() = default;
    template <typename M>
    explicit GaussSeidelPreconditioner(const M& m) { compute(m); }

    template <typename M>
    GaussSeidelPreconditioner& analyzePattern(const M&) { return *this; }
    template <typename M>
    GaussSeidelPreconditioner& factorize(const M& m) { return compute(m); }
    template <typename M>
    GaussSeidelPreconditioner& compute(const M& m) {
        a_ = SparseMatrix(m);
        ok_ = true;
        for (Eigen::Index r = 0; r < a_.rows(); ++r) {
            if (a_.coeff(r, r) == 0.0) ok_ = false;
        }
        return *this;
    }

    template <typename Rhs>
    Vector solve(const Eigen::MatrixBase<Rhs>& b) const {
        Vector y(b.size());
        for (Eigen::Index r = 0; r < a_.rows(); ++r) {
            double acc = b[r];
            double diag = 1.0;
            for (SparseMatrix::InnerIterator it(a_, r); it; ++it) {
                if (it.col() < r) acc -= it.value() * y[it.col()];
                else if (it.col() == r) diag = it.value();
            }
            y[r] = acc / diag;
        }
        return y;
    }

    Eigen::ComputationInfo info() const { return ok_ ? Eigen::Success : Eigen::NumericalIssue; }

private:
    SparseMatrix a_;
    bool ok_ = false;
};

inline double relative_residual(const DiscreteOperator& op, const Vector& u) {
    const double scale = std::max(op.rhs.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    const double r = (op.matrix * u - op.rhs).cwiseAbs().maxCoeff();
    return op.rhs.cwiseAbs().maxCoeff() == 0.0 ? r : r / scale;
}

/// Direct sparse LU up to direct_max_unknowns, Gauss-Seidel preconditioned BiCGSTAB beyond.
inline SolveReport solve_linear(const DiscreteOperator& op, const SolveOptions& options = {}) {
    const Eigen::Index n = op.matrix.rows();
    SolveReport rep;
    rep.warnings = op.warnings;
    const MMatrixReport mm = check_m_matrix(op);
    rep.m_matrix_ok = mm.ok;
    rep.m_matrix_witnesses = mm.witnesses;
    if (n == 0) fail(ErrorKind::Precondition, "empty system");

    bool has_dirichlet = std::any_of(op.row_kind.begin(), op.row_kind.end(),
                                     [](RowKind k) { return k == RowKind::Dirichlet; });
    if (!has_dirichlet) {
        const Vector sums = op.matrix * Vector::Ones(n);
        const double scale = std::max(1.0, op.matrix.coeffs().cwiseAbs().maxCoeff());
        if (sums.cwiseAbs().maxCoeff() <= 1e-12 * scale) {
            fail(ErrorKind::Singular, "no boundary data and zero row sums: constants lie in the kernel");
        }
    }

    Vector u;
    if (static_cast<std::size_t>(n) <= options.direct_max_unknowns) {
        rep.method = "sparse_lu";
        Eigen::SparseMatrix<double> cm(op.matrix);
        Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
        lu.analyzePattern(cm);
        lu.factorize(cm);
        if (lu.info() != Eigen::Success) fail(ErrorKind::Singular, "sparse LU failed: " + lu.lastErrorMessage());
        u = lu.solve(op.rhs);
    } else {
        rep.method = "bicgstab_gauss_seidel";
        Eigen::BiCGSTAB<SparseMatrix, GaussSeidelPreconditioner> solver;
        solver.setTolerance(options.iterative_tol);
        solver.setMaxIterations(options.max_iterations);
        solver.compute(op.matrix);
        if (solver.info() != Eigen::Success) fail(ErrorKind::Singular, "preconditioner setup failed (zero diagonal)");
        u = solver.solve(op.rhs);
        if (solver.info() != Eigen::Success) {
            fail(ErrorKind::Convergence, "BiCGSTAB stopped at estimated error " + format_double(solver.error()));
        }
    }
    if (!u.allFinite()) fail(ErrorKind::Singular, "solution is not finite");
    rep.residual_norm = relative_residual(op, u);
    if (rep.residual_norm > 1e-8) {
        fail(ErrorKind::Singular, "relative residual " + format_double(rep.residual_norm) + " indicates a singular system");
    }
    rep.solution = std::move(u);
    return rep;
}

struct WeakMaxResult {
    double bound = 0.0;
    double max_u = 0.0;
    std::vector<std::size_t> violations;
};

/// Checks u <= max(0, sup g, sup f / c0) node-wise; c0 = 0 drops the source term and presumes f <= 0.
inline WeakMaxResult discrete_weak_max_check(const SolveReport& report, const DiscreteOperator& op, double c0) {
    if (c0 < 0.0) fail(ErrorKind::Precondition, "c0 must be non-negative");
    double sup_g = 0.0;
    double sup_f = 0.0;
    for (std::size_t i = 0; i < op.row_kind.size(); ++i) {
        const double v = op.rhs[static_cast<Eigen::Index>(i)];
        if (op.row_kind[i] == RowKind::Dirichlet) sup_g = std::max(sup_g, v);
        else sup_f = std::max(sup_f, v);
    }
    WeakMaxResult out;
    out.bound = sup_g;
    if (c0 > 0.0) out.bound = std::max(out.bound, sup_f / c0);
    const double tol = 1e-9 * std::max(1.0, std::abs(out.bound));
    out.max_u = report.solution.maxCoeff();
    for (Eigen::Index i = 0; i < report.solution.size(); ++i) {
        if (report.solution[i] > out.bound + tol) out.violations.push_back(static_cast<std::size_t>(i));
    }
    return out;
}

struct StrongMaxDiagnostic {
    std::string status;  ///< "max on Dirichlet boundary" or "interior max".
    double max_value = 0.0;
    std::size_t argmax = 0;
    double argmax_time = 0.0;
    std::size_t component_size = 0;
    bool zero_order_free = false;
    double deviation = 0.0;
    bool constant = false;
};

namespace detail {

inline std::vector<std::size_t> non_dirichlet_component(const DiscreteOperator& op, std::size_t start) {
    std::vector<char> seen(op.row_kind.size(), 0);
    std::vector<std::size_t> comp;
    std::queue<std::size_t> q;
    q.push(start);
    seen[start] = 1;
    while (!q.empty()) {
        const std::size_t r = q.front();
        q.pop();
        comp.push_back(r);
        for (SparseMatrix::InnerIterator it(op.matrix, static_cast<Eigen::Index>(r)); it; ++it) {
            const auto c = static_cast<std::size_t>(it.col());
            if (c == r || seen[c] || op.row_kind[c] == RowKind::Dirichlet) continue;
            seen[c] = 1;
            q.push(c);
        }
    }
    std::sort(comp.begin(), comp.end());
    return comp;
}

}  // namespace detail

/// Reports whether an interior discrete maximum forces constancy on its non-Dirichlet component.
inline StrongMaxDiagnostic discrete_strong_max_check(const SolveReport& report, const DiscreteOperator& op,
                                                     double tol = 1e-9) {
    StrongMaxDiagnostic d;
    const Vector& u = report.solution;
    d.max_value = u.maxCoeff();
    const double cut = d.max_value - tol * std::max(1.0, std::abs(d.max_value));
    std::optional<std::size_t> interior;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        if (u[i] >= cut && op.row_kind[static_cast<std::size_t>(i)] != RowKind::Dirichlet) {
            interior = static_cast<std::size_t>(i);
            break;
        }
    }
    if (!interior) {
        d.status = "max on Dirichlet boundary";
        Eigen::Index k = 0;
        u.maxCoeff(&k);
        d.argmax = static_cast<std::size_t>(k);
        return d;
    }
    d.status = "interior max";
    d.argmax = *interior;
    const auto comp = detail::non_dirichlet_component(op, *interior);
    d.component_size = comp.size();
    d.zero_order_free = true;
    const Vector sums = op.matrix * Vector::Ones(u.size());
    for (std::size_t r : comp) {
        d.deviation = std::max(d.deviation, d.max_value - u[static_cast<Eigen::Index>(r)]);
        if (std::abs(sums[static_cast<Eigen::Index>(r)]) > 1e-12 * std::max(1.0, op.matrix.coeff(r, r))) {
            d.zero_order_free = false;
        }
    }
    d.constant = d.deviation <= tol * std::max(1.0, std::abs(d.max_value));
    return d;
}

struct ParabolicProblem {
    CoefficientField coeffs;
    std::shared_ptr<const Grid> grid;
    BoundaryClassification classification;
    DataFn f;
    /// Side data on the non-degenerate boundary.
    DataFn g;
    /// Data on the terminal face t = T.
    std::function<double(const Vector&)> terminal;
    /// Decreasing, from T down to 0.
    std::vector<double> times;
    AssemblyOptions assembly;
};

struct ParabolicSolution {
    std::vector<double> times;
    /// slices[k] is the solution at times[k]; slices[0] is the terminal data.
    std::vector<Vector> slices;
    std::vector<DiscreteOperator> operators;
    bool m_matrix_ok = true;
    double max_residual = 0.0;
    std::vector<std::string> warnings;
};

/// Uniform decreasing time grid T = t_0 > ... > t_steps = 0.
inline std::vector<double> backward_time_grid(double T, int steps) {
    if (!(T > 0.0) || steps < 1) fail(ErrorKind::Precondition, "time grid needs T > 0 and at least one step");
    std::vector<double> times;
    for (int k = 0; k <= steps; ++k) times.push_back(T * (steps - k) / steps);
    return times;
}

inline ParabolicProblem assemble_parabolic(const CoefficientField& coeffs, const Grid& grid,
                                           const std::vector<double>& times, const BoundaryClassification& cls,
                                           DataFn f, DataFn g, std::function<double(const Vector&)> terminal,
                                           const AssemblyOptions& options = {}) {
    if (times.size() < 2) fail(ErrorKind::Precondition, "time grid needs at least two levels");
    for (std::size_t k = 1; k < times.size(); ++k) {
        if (!(times[k - 1] - times[k] > 0.0)) fail(ErrorKind::Precondition, "time steps must be positive");
    }
    if (!terminal) fail(ErrorKind::Config, "missing terminal data");
    if (grid.domain().is_half_graph()) fail(ErrorKind::Unsupported, "finite differences need a straightened domain");
    ParabolicProblem p;
    p.coeffs = coeffs;
    p.grid = std::make_shared<const Grid>(grid);
    p.classification = cls;
    p.f = std::move(f);
    p.g = std::move(g);
    p.terminal = std::move(terminal);
    p.times = times;
    p.assembly = options;
    return p;
}

/// Builds the backward Euler system for the step times[k-1] -> times[k].
inline DiscreteOperator parabolic_step_operator(const ParabolicProblem& p, std::size_t k, const Vector& next) {
    AssemblyOptions o = p.assembly;
    o.time = p.times[k];
    o.dt = p.times[k - 1] - p.times[k];
    o.next_slice = &next;
    return assemble_elliptic(p.coeffs, *p.grid, p.classification, p.f, p.g, o);
}

inline Vector terminal_slice(const ParabolicProblem& p) {
    Vector u(static_cast<Eigen::Index>(p.grid->size()));
    for (std::size_t i = 0; i < p.grid->size(); ++i) {
        u[static_cast<Eigen::Index>(i)] = p.terminal(p.grid->node(i));
        if (!std::isfinite(u[static_cast<Eigen::Index>(i)])) {
            fail(ErrorKind::Config, "terminal data not finite at " + format_point(p.grid->node(i)));
        }
    }
    return u;
}

inline ParabolicSolution solve_parabolic(const ParabolicProblem& p, const SolveOptions& options = {},
                                         bool keep_operators = false) {
    ParabolicSolution sol;
    sol.times = p.times;
    sol.slices.push_back(terminal_slice(p));
    for (std::size_t k = 1; k < p.times.size(); ++k) {
        DiscreteOperator op = parabolic_step_operator(p, k, sol.slices.back());
        SolveReport rep = solve_linear(op, options);
        sol.m_matrix_ok = sol.m_matrix_ok && rep.m_matrix_ok;
        sol.max_residual = std::max(sol.max_residual, rep.residual_norm);
        for (auto& w : rep.warnings) {
            if (std::find(sol.warnings.begin(), sol.warnings.end(), w) == sol.warnings.end()) sol.warnings.push_back(w);
        }
        sol.slices.push_back(std::move(rep.solution));
        if (keep_operators) sol.operators.push_back(std::move(op));
    }
    return sol;
}

/// Parabolic strong maximum diagnostic: constancy on S(P0), the nodes at times <= t0
/// in the spatial non-Dirichlet component of the maximizer.
inline StrongMaxDiagnostic discrete_strong_max_check(const ParabolicSolution& sol, const DiscreteOperator& spatial,
                                                     double tol = 1e-9) {
    StrongMaxDiagnostic d;
    d.max_value = -std::numeric_limits<double>::infinity();
    for (const Vector& s : sol.slices) d.max_value = std::max(d.max_value, s.maxCoeff());
    const double cut = d.max_value - tol * std::max(1.0, std::abs(d.max_value));
    std::optional<std::pair<std::size_t, std::size_t>> hit;
    for (std::size_t k = 0; k < sol.slices.size() && !hit; ++k) {
        for (Eigen::Index i = 0; i < sol.slices[k].size(); ++i) {
            if (sol.slices[k][i] >= cut && spatial.row_kind[static_cast<std::size_t>(i)] != RowKind::Dirichlet) {
                if (k == 0) continue;  // terminal face carries data
                hit = std::make_pair(k, static_cast<std::size_t>(i));
                break;
            }
        }
    }
    if (!hit) {
        d.status = "max on Dirichlet boundary";
        return d;
    }
    d.status = "interior max";
    d.argmax = hit->second;
    d.argmax_time = sol.times[hit->first];
    const auto comp = detail::non_dirichlet_component(spatial, hit->second);
    for (std::size_t k = hit->first; k < sol.slices.size(); ++k) {
        for (std::size_t r : comp) {
            d.deviation = std::max(d.deviation, d.max_value - sol.slices[k][static_cast<Eigen::Index>(r)]);
            ++d.component_size;
        }
    }
    d.constant = d.deviation <= tol * std::max(1.0, std::abs(d.max_value));
    return d;
}

struct ConvergenceReport {
    std::vector<int> levels;
    std::vector<double> h;
    std::vector<double> errors;
    double rate = std::numeric_limits<double>::quiet_NaN();
    bool exact = false;
    bool unstable = false;
};

/// Max-norm errors over grid levels and the least-squares slope of log(error) against log(h).
inline ConvergenceReport convergence_study(const std::function<std::pair<Grid, Vector>(int)>& solve_at,
                                           const std::function<double(const Vector&)>& exact,
                                           const std::vector<int>& levels) {
    if (levels.size() < 2) fail(ErrorKind::Precondition, "convergence study needs at least two levels");
    ConvergenceReport rep;
    for (int level : levels) {
        auto [grid, u] = solve_at(level);
        double err = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            err = std::max(err, std::abs(u[static_cast<Eigen::Index>(i)] - exact(grid.node(i))));
        }
        rep.levels.push_back(level);
        rep.h.push_back(grid.min_spacing());
        rep.errors.push_back(err);
    }
    rep.exact = std::all_of(rep.errors.begin(), rep.errors.end(), [](double e) { return e < 1e-13; });
    if (rep.exact) return rep;
    if (rep.errors.size() >= 3) {
        for (std::size_t k = 1; k < rep.errors.size(); ++k) {
            if (!(rep.errors[k] < rep.errors[k - 1])) rep.unstable = true;
        }
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double m = static_cast<double>(rep.errors.size());
    for (std::size_t k = 0; k < rep.errors.size(); ++k) {
        const double lx = std::log(rep.h[k]);
        const double ly = std::log(std::max(rep.errors[k], 1e-300));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    rep.rate = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    return rep;
}

}  // namespace degenmax
