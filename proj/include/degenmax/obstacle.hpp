#pragma once

#include "degenmax/common.hpp"
#include "degenmax/fd_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace degenmax {

/// Discrete min{A u - f, u - psi} = 0 with the Dirichlet rows of op fixed.
struct ObstacleProblem {
    DiscreteOperator op;
    Vector psi;
};

struct ObstacleSolution {
    Vector u;
    std::vector<std::size_t> active_set;
    double complementarity_residual = 0.0;
    int iterations = 0;
    bool converged = false;
    double final_change = 0.0;
    bool m_matrix_ok = false;
    /// Only meaningful when tracking was requested.
    bool monotone_iterates = true;
};

struct PsorOptions {
    double omega = 1.5;
    double tol = 1e-8;
    int max_iter = 200000;
    /// Starting iterate; projected onto u >= psi. Defaults to psi.
    std::optional<Vector> initial;
    bool track_monotone = false;
};

inline ObstacleProblem make_obstacle_problem(DiscreteOperator op, const std::function<double(const Vector&)>& psi) {
    ObstacleProblem p;
    p.psi.resize(op.matrix.rows());
    for (std::size_t i = 0; i < op.grid->size(); ++i) {
        const Vector& x = op.grid->node(i);
        const double v = psi(x);
        if (std::isnan(v)) fail(ErrorKind::Config, "obstacle not defined at " + format_point(x));
        p.psi[static_cast<Eigen::Index>(i)] = v;
        if (op.row_kind[i] == RowKind::Dirichlet && v > op.rhs[static_cast<Eigen::Index>(i)] + 1e-12) {
            fail(ErrorKind::Config, "obstacle exceeds boundary data at " + format_point(x));
        }
    }
    p.op = std::move(op);
    return p;
}

/// max over non-Dirichlet nodes of |min(A u - f, u - psi)|.
inline double complementarity_residual(const ObstacleProblem& p, const Vector& u) {
    const Vector r = p.op.matrix * u - p.op.rhs;
    double out = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        if (p.op.row_kind[static_cast<std::size_t>(i)] == RowKind::Dirichlet) continue;
        out = std::max(out, std::abs(std::min(r[i], u[i] - p.psi[i])));
    }
    return out;
}

/// One-sided check of the supersolution branch: A u - f >= -tol and u - psi >= -tol.
inline bool is_supersolution(const ObstacleProblem& p, const Vector& u, double tol) {
    const Vector r = p.op.matrix * u - p.op.rhs;
    for (Eigen::Index i = 0; i < u.size(); ++i) {
        if (p.op.row_kind[static_cast<std::size_t>(i)] == RowKind::Dirichlet) continue;
        if (r[i] < -tol || u[i] - p.psi[i] < -tol) return false;
    }
    return true;
}

/// Projected SOR in lexicographic node order.
///
/// Stops once the sweep-to-sweep change is below tol and the contraction estimate
/// from consecutive changes puts the remaining error below tol as well.
inline ObstacleSolution solve_obstacle_elliptic(const ObstacleProblem& p, const PsorOptions& o = {}) {
    if (!(o.omega > 0.0 && o.omega < 2.0)) fail(ErrorKind::Precondition, "omega must lie in (0, 2)");
    if (!(o.tol > 0.0) || o.max_iter < 1) fail(ErrorKind::Precondition, "tol and max_iter must be positive");
    const SparseMatrix& a = p.op.matrix;
    const Eigen::Index n = a.rows();
    ObstacleSolution sol;
    sol.m_matrix_ok = check_m_matrix(p.op).ok;

    Vector u = o.initial ? *o.initial : p.psi;
    if (u.size() != n) fail(ErrorKind::Precondition, "initial iterate has wrong size");
    Vector diag(n);
    for (Eigen::Index r = 0; r < n; ++r) {
        diag[r] = a.coeff(r, r);
        if (p.op.row_kind[static_cast<std::size_t>(r)] == RowKind::Dirichlet) {
            u[r] = p.op.rhs[r];
        } else {
            if (!(diag[r] > 0.0)) fail(ErrorKind::Precondition, "non-positive diagonal in obstacle system");
            u[r] = std::max(u[r], p.psi[r]);
        }
    }

    double prev_change = 0.0;
    double rate = 0.0;
    for (int it = 1; it <= o.max_iter; ++it) {
        double change = 0.0;
        for (Eigen::Index r = 0; r < n; ++r) {
            if (p.op.row_kind[static_cast<std::size_t>(r)] == RowKind::Dirichlet) continue;
            double acc = p.op.rhs[r];
            for (SparseMatrix::InnerIterator e(a, r); e; ++e) {
                if (e.col() != r) acc -= e.value() * u[e.col()];
            }
            const double gs = acc / diag[r];
            const double next = std::max(p.psi[r], u[r] + o.omega * (gs - u[r]));
            if (o.track_monotone && next < u[r]) sol.monotone_iterates = false;
            change = std::max(change, std::abs(next - u[r]));
            u[r] = next;
        }
        sol.iterations = it;
        sol.final_change = change;
        if (prev_change > 0.0) rate = std::max(0.95 * rate, std::min(change / prev_change, 0.9999));
        prev_change = change;
        const double remaining = rate / (1.0 - rate) * change;
        if (change < o.tol && remaining < o.tol && it > 1) {
            sol.converged = true;
            break;
        }
        if (change == 0.0) {
            sol.converged = true;
            break;
        }
    }
    sol.complementarity_residual = complementarity_residual(p, u);
    const double tol_active = 10.0 * o.tol;
    for (Eigen::Index r = 0; r < n; ++r) {
        if (p.op.row_kind[static_cast<std::size_t>(r)] == RowKind::Dirichlet) continue;
        if (u[r] - p.psi[r] <= tol_active) sol.active_set.push_back(static_cast<std::size_t>(r));
    }
    sol.u = std::move(u);
    return sol;
}

struct ObstacleSequence {
    std::vector<double> times;
    std::vector<Vector> slices;
    std::vector<std::vector<std::size_t>> active_sets;
    double max_complementarity = 0.0;
    bool converged = true;
    bool m_matrix_ok = true;
    int total_iterations = 0;
};

/// Backward Euler from T with a projected SOR solve per step.
inline ObstacleSequence solve_obstacle_parabolic(const ParabolicProblem& prob,
                                                 const std::function<double(double, const Vector&)>& psi,
                                                 const PsorOptions& o = {}) {
    ObstacleSequence seq;
    seq.times = prob.times;
    Vector terminal = terminal_slice(prob);
    for (std::size_t i = 0; i < prob.grid->size(); ++i) {
        if (terminal[static_cast<Eigen::Index>(i)] < psi(prob.times.front(), prob.grid->node(i)) - 1e-12) {
            fail(ErrorKind::Config, "terminal data below the obstacle at " + format_point(prob.grid->node(i)));
        }
    }
    seq.slices.push_back(terminal);
    seq.active_sets.emplace_back();
    for (std::size_t k = 1; k < prob.times.size(); ++k) {
        const double t = prob.times[k];
        ObstacleProblem step = make_obstacle_problem(parabolic_step_operator(prob, k, seq.slices.back()),
                                                     [&](const Vector& x) { return psi(t, x); });
        PsorOptions so = o;
        so.initial = seq.slices.back();
        ObstacleSolution s = solve_obstacle_elliptic(step, so);
        seq.converged = seq.converged && s.converged;
        seq.m_matrix_ok = seq.m_matrix_ok && s.m_matrix_ok;
        seq.max_complementarity = std::max(seq.max_complementarity, s.complementarity_residual);
        seq.total_iterations += s.iterations;
        seq.active_sets.push_back(std::move(s.active_set));
        seq.slices.push_back(std::move(s.u));
    }
    return seq;
}

struct ComparisonReport {
    bool ok = true;
    double max_violation = 0.0;
    double max_difference = 0.0;
    std::vector<std::size_t> witnesses;
};

/// Checks u2 >= u1 - tol node-wise; with identical data also |u2 - u1| < tol.
inline ComparisonReport comparison_check(const Vector& u1, const Vector& u2, double tol, bool identical_data = false) {
    if (u1.size() != u2.size()) fail(ErrorKind::Precondition, "solutions live on different grids");
    ComparisonReport rep;
    for (Eigen::Index i = 0; i < u1.size(); ++i) {
        const double diff = u2[i] - u1[i];
        rep.max_violation = std::max(rep.max_violation, -diff);
        rep.max_difference = std::max(rep.max_difference, std::abs(diff));
        const bool bad = identical_data ? std::abs(diff) >= tol : diff < -tol;
        if (bad) {
            rep.ok = false;
            rep.witnesses.push_back(static_cast<std::size_t>(i));
        }
    }
    return rep;
}

inline ComparisonReport comparison_check(const ObstacleSolution& s1, const ObstacleSolution& s2, double tol,
                                         bool identical_data = false) {
    return comparison_check(s1.u, s2.u, tol, identical_data);
}

}  // namespace degenmax
