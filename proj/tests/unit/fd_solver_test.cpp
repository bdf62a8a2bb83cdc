#include "degenmax/fd_solver.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace {

using namespace degenmax;

DataFn constant_data(double v) {
    return [v](double, const Vector&) { return v; };
}

Vector solve_kummer(int cells) {
    const Grid g = Grid::build(SpatialDomain::interval(0.0, 1.0), {cells, 0});
    const auto f = builtin::kummer(1.0, 1.0);
    const auto op = assemble_elliptic(f, g, classify_boundary(g, f), nullptr, constant_data(std::exp(1.0)));
    return solve_linear(op).solution;
}

TEST(Assembly, DegenerateRowHasNoDirichletData) {
    const Grid g = Grid::build(SpatialDomain::interval(0.0, 1.0), {8, 0});
    const auto f = builtin::kummer(1.0, 1.0);
    const auto op = assemble_elliptic(f, g, classify_boundary(g, f), nullptr, constant_data(2.0));
    EXPECT_EQ(op.row_kind[0], RowKind::DegenerateBoundary);
    EXPECT_EQ(op.row_kind[8], RowKind::Dirichlet);
    EXPECT_EQ(op.rhs[8], 2.0);
    EXPECT_TRUE(check_m_matrix(op).ok);
}

TEST(Assembly, DegenerateRowsNeverEvaluateDiffusion) {
    const CoefficientField kummer = builtin::kummer(1.0, 1.0);
    CoefficientField f = kummer;
    f.a = [](double, const Vector& x) {
        if (x[0] == 0.0) fail(ErrorKind::Evaluation, "a evaluated on the degenerate boundary");
        return Matrix::Constant(1, 1, x[0]);
    };
    const Grid g = Grid::build(SpatialDomain::interval(0.0, 1.0), {8, 0});
    EXPECT_NO_THROW(assemble_elliptic(f, g, classify_boundary(g, kummer), nullptr, constant_data(1.0)));
}

TEST(Assembly, HalfGraphIsUnsupported) {
    GraphFunction gamma{[](double) { return 0.0; }, [](double) { return 0.0; }, [](double) { return 0.0; }};
    const Grid g = Grid::build(SpatialDomain::half_graph(Rectangle{}, gamma), {4, 4});
    const auto f = builtin::heston_like({});
    try {
        assemble_elliptic(f, g, classify_boundary(g, f), nullptr, constant_data(0.0));
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Unsupported);
    }
}

TEST(Assembly, MissingBoundaryDataIsConfigError) {
    const Grid g = Grid::build(SpatialDomain::interval(0.0, 1.0), {8, 0});
    const auto f = builtin::kummer(1.0, 1.0);
    const DataFn nan = [](double, const Vector&) { return std::nan(""); };
    try {
        assemble_elliptic(f, g, classify_boundary(g, f), nullptr, nan);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Config);
    }
}

TEST(Assembly, DownwindBreaksMonotonicity) {
    const Grid g = Grid::build(SpatialDomain::interval(0.0, 1.0), {16, 0});
    const auto f = builtin::kummer(1.0, 3.0);
    AssemblyOptions o;
    o.drift = DriftScheme::Downwind;
    EXPECT_FALSE(check_m_matrix(assemble_elliptic(f, g, classify_boundary(g, f), nullptr, constant_data(1.0), o)).ok);
}

TEST(Assembly, OutflowCornerTakesBoundaryData) {
    const auto f = builtin::linear_in_distance(Matrix::Identity(2, 2), make_point({0.5, 1.0}), 0.0);
    const Grid g = Grid::build(SpatialDomain::rectangle(0.0, 1.0, 0.0, 1.0), {8, 8});
    const auto op = assemble_elliptic(f, g, classify_boundary(g, f), nullptr, constant_data(0.0));
    EXPECT_EQ(op.row_kind[*g.at(8, 0)], RowKind::Dirichlet);
    EXPECT_EQ(op.row_kind[*g.at(0, 0)], RowKind::DegenerateBoundary);
    EXPECT_TRUE(check_m_matrix(op).ok);
}

TEST(Solve, UpwindIsExactForLinearSolutions) {
    const auto f = builtin::constant(Matrix::Identity(1, 1), Vector::Constant(1, 1.0), 1.0);
    const Grid g = Grid::build(SpatialDomain::interval(0.0, 1.0), {10, 0});
    const auto exact = [](double x) { return 2.0 * x + 1.0; };
    const DataFn src = [&](double, const Vector& x) { return -2.0 + exact(x[0]); };
    const DataFn bc = [&](double, const Vector& x) { return exact(x[0]); };
    const auto rep = solve_linear(assemble_elliptic(f, g, classify_boundary(g, f), src, bc));
    for (std::size_t n = 0; n < g.size(); ++n) {
        EXPECT_NEAR(rep.solution[static_cast<Eigen::Index>(n)], exact(g.node(n)[0]), 1e-12);
    }
    EXPECT_TRUE(rep.m_matrix_ok);
    EXPECT_LT(rep.residual_norm, 1e-12);
}

TEST(Solve, KummerApproachesExponential) {
    const Vector u = solve_kummer(128);
    double err = 0.0;
    for (Eigen::Index i = 0; i < u.size(); ++i) err = std::max(err, std::abs(u[i] - std::exp(i / 128.0)));
    EXPECT_LT(err, 2e-2);
}

TEST(Solve, FirstOrderConvergence) {
    const auto rep = convergence_study(
        [](int cells) {
            const Grid g = Grid::build(SpatialDomain::interval(0.0, 1.0), {cells, 0});
            return std::pair{g, solve_kummer(cells)};
        },
        [](const Vector& x) { return std::exp(x[0]); }, {32, 64, 128, 256});
    EXPECT_GE(rep.rate, 0.9);
    EXPECT_FALSE(rep.unstable);
    EXPECT_EQ(rep.errors.size(), 4u);
}

TEST(Solve, HypergeometricNeedsNoBoundaryData) {
    const Grid g = Grid::build(SpatialDomain::interval(0.0, 1.0), {64, 0});
    const auto f = builtin::hypergeometric(1.0, 1.0, 1.0);
    const auto cls = classify_boundary(g, f);
    EXPECT_TRUE(cls.nondegenerate_nodes.empty());
    const auto rep = solve_linear(assemble_elliptic(f, g, cls, constant_data(1.0), nullptr));
    for (Eigen::Index i = 0; i < rep.solution.size(); ++i) EXPECT_NEAR(rep.solution[i], 1.0, 1e-10);
}

TEST(MaxPrinciple, RandomNonPositiveDataGivesNonPositiveSolution) {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const Grid g = Grid::build(SpatialDomain::rectangle(0.0, 1.0, 0.0, 1.0), {12, 12});
    for (int trial = 0; trial < 10; ++trial) {
        Matrix A(2, 2);
        A << 0.5 + u(rng), 0.0, 0.0, 0.5 + u(rng);
        const auto f = builtin::linear_in_distance(A, make_point({u(rng) - 0.5, 0.5 + u(rng)}), u(rng));
        const double s = u(rng), gv = -u(rng);
        const DataFn src = [s](double, const Vector& x) { return -s * (1.0 + x[0]); };
        const auto op = assemble_elliptic(f, g, classify_boundary(g, f), src, constant_data(gv));
        const auto rep = solve_linear(op);
        EXPECT_LE(rep.solution.maxCoeff(), 1e-12);
        const auto wm = discrete_weak_max_check(rep, op, 0.0);
        EXPECT_TRUE(wm.violations.empty());
    }
}

TEST(MaxPrinciple, SourceBoundWithPositivePotential) {
    const Grid g = Grid::build(SpatialDomain::interval(0.0, 1.0), {64, 0});
    const auto f = builtin::kummer(1.0, 2.0);
    const DataFn src = [](double, const Vector& x) { return 0.7 * std::cos(5.0 * x[0]); };
    const auto op = assemble_elliptic(f, g, classify_boundary(g, f), src, constant_data(-0.2));
    const auto rep = solve_linear(op);
    const auto wm = discrete_weak_max_check(rep, op, 1.0);
    EXPECT_LE(wm.max_u, wm.bound + 1e-12);
    EXPECT_NEAR(wm.bound, 0.7, 1e-3);
}

TEST(MaxPrinciple, StrongDiagnosticFindsBoundaryMax) {
    const Grid g = Grid::build(SpatialDomain::interval(0.0, 1.0), {32, 0});
    const auto f = builtin::kummer(1.0, 1.0);
    const auto op = assemble_elliptic(f, g, classify_boundary(g, f), nullptr, constant_data(std::exp(1.0)));
    const auto d = discrete_strong_max_check(solve_linear(op), op);
    EXPECT_EQ(d.argmax, 32u);
    EXPECT_FALSE(d.constant);
}

TEST(Parabolic, BackwardEulerExactForAffineSolutions) {
    auto f = builtin::constant(Matrix::Identity(1, 1), Vector::Zero(1), 0.0);
    f.parabolic = true;
    const Grid g = Grid::build(SpatialDomain::interval(0.0, 1.0), {10, 0});
    const double T = 0.5;
    const DataFn exact = [](double t, const Vector& x) { return x[0] + t; };
    const auto prob = assemble_parabolic(f, g, backward_time_grid(T, 5), classify_boundary(g, f), constant_data(-1.0),
                                         exact, [&](const Vector& x) { return exact(T, x); });
    const auto sol = solve_parabolic(prob);
    ASSERT_EQ(sol.slices.size(), 6u);
    EXPECT_DOUBLE_EQ(sol.times.front(), T);
    EXPECT_DOUBLE_EQ(sol.times.back(), 0.0);
    for (std::size_t k = 0; k < sol.slices.size(); ++k) {
        for (std::size_t n = 0; n < g.size(); ++n) {
            EXPECT_NEAR(sol.slices[k][static_cast<Eigen::Index>(n)], exact(sol.times[k], g.node(n)), 1e-12);
        }
    }
}

TEST(Parabolic, TimeGridValidation) {
    EXPECT_THROW(backward_time_grid(0.0, 4), Error);
    EXPECT_THROW(backward_time_grid(1.0, 0), Error);
    EXPECT_EQ(backward_time_grid(1.0, 4).size(), 5u);
}

TEST(Parabolic, MissingTerminalDataIsConfigError) {
    auto f = builtin::kummer(1.0, 1.0);
    const Grid g = Grid::build(SpatialDomain::interval(0.0, 1.0), {8, 0});
    EXPECT_THROW(assemble_parabolic(f, g, backward_time_grid(1.0, 2), classify_boundary(g, f), nullptr,
                                    constant_data(1.0), nullptr),
                 Error);
}

}  // namespace
