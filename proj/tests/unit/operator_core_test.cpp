#include "degenmax/operator_core.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using namespace degenmax;

TEST(Classification, KummerIntervalDegenerateAtOrigin) {
    const Grid g = Grid::build(SpatialDomain::interval(0.0, 1.0), {32, 0});
    const auto cls = classify_boundary(g, builtin::kummer(1.0, 1.0));
    EXPECT_TRUE(cls.is_degenerate(0));
    EXPECT_TRUE(cls.is_nondegenerate(32));
    EXPECT_EQ(cls.degenerate_nodes.size(), 1u);
    EXPECT_EQ(cls.node_class[5], NodeClass::Interior);
}

TEST(Classification, HestonBottomEdgeOnly) {
    const Grid g = Grid::build(SpatialDomain::rectangle(-1.0, 1.0, 0.0, 1.0), {8, 8});
    const auto cls = classify_boundary(g, builtin::heston_like({}));
    for (std::size_t n : g.boundary_nodes()) {
        const bool bottom = g.node(n)[1] == 0.0;
        EXPECT_EQ(cls.is_degenerate(n), bottom) << format_point(g.node(n));
    }
}

TEST(Classification, HypergeometricDegenerateAtBothEnds) {
    const Grid g = Grid::build(SpatialDomain::interval(0.0, 1.0), {16, 0});
    const auto cls = classify_boundary(g, builtin::hypergeometric(1.0, 1.0, 1.0));
    EXPECT_TRUE(cls.is_degenerate(0));
    EXPECT_TRUE(cls.is_degenerate(16));
}

TEST(Fichera, KummerValueIsBMinusOne) {
    const Grid g = Grid::build(SpatialDomain::interval(0.0, 1.0), {32, 0});
    const auto f = builtin::kummer(1.0, 2.5);
    const auto cls = classify_boundary(g, f);
    EXPECT_NEAR(fichera_function(f, cls, g, 0), 1.5, 1e-12);
}

TEST(Fichera, HestonBottomEdge) {
    builtin::HestonParams p;
    const Grid g = Grid::build(SpatialDomain::rectangle(-1.0, 1.0, 0.0, 1.0), {8, 8});
    const auto f = builtin::heston_like(p);
    const auto cls = classify_boundary(g, f);
    const double oracle = p.kappa * p.theta - 0.5 * p.sigma * p.sigma;
    EXPECT_NEAR(fichera_function(f, cls, g, *g.at(4, 0)), oracle, 1e-12);
    EXPECT_THROW(fichera_function(f, cls, g, *g.at(4, 8)), Error);
}

TEST(Fichera, FiniteDifferenceDivergenceWithoutDa) {
    auto f = builtin::kummer(1.0, 2.5);
    f.da = nullptr;
    const Grid g = Grid::build(SpatialDomain::interval(0.0, 1.0), {32, 0});
    const auto cls = classify_boundary(g, f);
    EXPECT_NEAR(fichera_function(f, cls, g, 0), 1.5, 1e-9);
}

TEST(Lipschitz, LinearInDistanceRecoversNorm) {
    Matrix A(2, 2);
    A << 2.0, 0.5, 0.5, 1.0;
    const auto f = builtin::linear_in_distance(A, make_point({0.0, 1.0}), 0.0);
    const Grid g = Grid::build(SpatialDomain::rectangle(0.0, 1.0, 0.0, 1.0), {8, 8});
    const auto est = estimate_boundary_lipschitz(f, classify_boundary(g, f), g, 0.25);
    Eigen::SelfAdjointEigenSolver<Matrix> es(A);
    EXPECT_NEAR(est.K, es.eigenvalues().maxCoeff(), 1e-12);
    EXPECT_FALSE(est.non_lipschitz);
}

TEST(Lipschitz, SquareRootDegeneracyIsFlagged) {
    CoefficientField f;
    f.dim = 1;
    f.a = [](double, const Vector& x) { return Matrix::Constant(1, 1, std::sqrt(std::max(0.0, x[0]))); };
    f.b = [](double, const Vector&) { return Vector::Constant(1, 1.0); };
    f.c = [](double, const Vector&) { return 0.0; };
    const Grid g = Grid::build(SpatialDomain::interval(0.0, 1.0), {64, 0});
    const auto est = estimate_boundary_lipschitz(f, classify_boundary(g, f, {0.05, {0.0}}), g, 0.25);
    EXPECT_TRUE(est.non_lipschitz);
}

TEST(ApplyOperator, ExponentialSolvesKummer) {
    const auto f = builtin::kummer(1.0, 1.0);
    ScalarField u;
    u.value = [](double, const Vector& x) { return std::exp(x[0]); };
    u.gradient = [](double, const Vector& x) { return Vector::Constant(1, std::exp(x[0])); };
    u.hessian = [](double, const Vector& x) { return Matrix::Constant(1, 1, std::exp(x[0])); };
    for (double x : {0.0, 0.4, 0.9}) EXPECT_NEAR(apply_operator(f, u, make_point({x})), 0.0, 1e-14);
}

TEST(ApplyOperator, ParabolicIncludesTimeDerivative) {
    auto f = builtin::constant(Matrix::Identity(1, 1), Vector::Zero(1), 0.0);
    f.parabolic = true;
    ScalarField u;
    u.value = [](double t, const Vector&) { return t; };
    u.gradient = [](double, const Vector&) { return Vector::Zero(1); };
    u.hessian = [](double, const Vector&) { return Matrix::Zero(1, 1); };
    u.time_derivative = [](double, const Vector&) { return 1.0; };
    EXPECT_DOUBLE_EQ(apply_operator(f, u, make_point({0.5}), 0.3), -1.0);
}

TEST(SecondDerivative, DistinguishesSmoothAndSingular) {
    const Grid g = Grid::build(SpatialDomain::interval(0.0, 1.0), {64, 0});
    const auto cls = classify_boundary(g, builtin::kummer(1.0, 2.0));
    SecondDerivativeOptions o;
    o.s0 = 0.25;
    o.divergence_asserted = true;
    const auto theta = [](double s) { return s; };
    const auto smooth = check_second_derivative_vanishing([](const Vector& x) { return x[0] * x[0]; }, cls, g, theta, o);
    EXPECT_TRUE(smooth.all_decay);
    const auto rough = check_second_derivative_vanishing(
        [](const Vector& x) { return std::sqrt(std::max(0.0, x[0])); }, cls, g, theta, o);
    EXPECT_FALSE(rough.all_decay);
}

TEST(SecondDerivative, RejectsThetaNotVanishing) {
    const Grid g = Grid::build(SpatialDomain::interval(0.0, 1.0), {16, 0});
    const auto cls = classify_boundary(g, builtin::kummer(1.0, 2.0));
    EXPECT_THROW(check_second_derivative_vanishing([](const Vector&) { return 0.0; }, cls, g,
                                                   [](double s) { return 1.0 + s; }),
                 Error);
}

}  // namespace
