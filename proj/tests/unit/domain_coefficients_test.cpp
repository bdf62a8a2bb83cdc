#include "degenmax/coefficients.hpp"
#include "degenmax/domain.hpp"

#include <gtest/gtest.h>

#include <bitset>
#include <cmath>

namespace {

using namespace degenmax;

TEST(Grid, IntervalLayout) {
    const Grid g = Grid::build(SpatialDomain::interval(0.0, 1.0), {4, 0});
    ASSERT_EQ(g.size(), 5u);
    EXPECT_DOUBLE_EQ(g.spacing(0), 0.25);
    EXPECT_EQ(g.sides(0), static_cast<unsigned>(kLeft));
    EXPECT_EQ(g.sides(4), static_cast<unsigned>(kRight));
    EXPECT_FALSE(g.is_boundary(2));
    EXPECT_DOUBLE_EQ(g.node(3)[0], 0.75);
    EXPECT_DOUBLE_EQ(g.inward_normal(0)[0], 1.0);
    EXPECT_DOUBLE_EQ(g.inward_normal(4)[0], -1.0);
    EXPECT_FALSE(g.neighbor(0, 0, -1).has_value());
    EXPECT_EQ(*g.neighbor(0, 0, +1), 1u);
}

TEST(Grid, RectangleLexicographicOrder) {
    const Grid g = Grid::build(SpatialDomain::rectangle(0.0, 2.0, 0.0, 1.0), {4, 2});
    ASSERT_EQ(g.size(), 15u);
    const std::size_t corner = *g.at(4, 0);
    EXPECT_EQ(corner, 4u);
    EXPECT_EQ(std::bitset<32>(g.sides(corner)).count(), 2u);
    EXPECT_TRUE(g.sides(corner) & kBottom);
    EXPECT_TRUE(g.sides(corner) & kRight);
    const Vector n = g.inward_normal(*g.at(2, 0));
    EXPECT_DOUBLE_EQ(n[0], 0.0);
    EXPECT_DOUBLE_EQ(n[1], 1.0);
    EXPECT_NEAR(g.inward_normal(corner).norm(), 1.0, 1e-15);
    EXPECT_FALSE(g.at(5, 0).has_value());
    EXPECT_EQ(g.boundary_nodes().size(), 12u);
}

TEST(Domain, HalfGraphMembership) {
    GraphFunction gamma{[](double x) { return 0.1 * x * x; }, [](double x) { return 0.2 * x; },
                        [](double) { return 0.2; }};
    const SpatialDomain d = SpatialDomain::half_graph(Rectangle{-1.0, 1.0, 0.0, 1.0}, gamma);
    EXPECT_TRUE(d.is_half_graph());
    EXPECT_TRUE(d.contains(make_point({0.9, 0.2})));
    EXPECT_FALSE(d.contains(make_point({0.9, 0.05})));
    EXPECT_NEAR(d.diameter(), std::sqrt(5.0), 1e-12);
}

TEST(Coefficients, BuiltinKummer) {
    const auto f = builtin::kummer(0.5, 2.0);
    const Vector x = make_point({0.3});
    EXPECT_DOUBLE_EQ(f.a(0.0, x)(0, 0), 0.3);
    EXPECT_DOUBLE_EQ(f.b(0.0, x)[0], 1.7);
    EXPECT_DOUBLE_EQ(f.c(0.0, x), 0.5);
}

TEST(Coefficients, HestonVanishesOnZeroVariance) {
    const auto f = builtin::heston_like({});
    EXPECT_EQ(f.a(0.0, make_point({0.4, 0.0})).norm(), 0.0);
    EXPECT_GT(f.b(0.0, make_point({0.4, 0.0}))[1], 0.0);
    check_coefficients_at(f, make_point({0.1, 0.5}));
}

TEST(Coefficients, ValidationRejectsIndefiniteMatrix) {
    Matrix a(2, 2);
    a << 1.0, 0.0, 0.0, -1.0;
    const auto f = builtin::constant(a, Vector::Zero(2), 0.0);
    EXPECT_THROW(check_coefficients_at(f, Vector::Zero(2)), Error);
    Matrix ns(2, 2);
    ns << 1.0, 0.5, 0.0, 1.0;
    EXPECT_THROW(check_coefficients_at(builtin::constant(ns, Vector::Zero(2), 0.0), Vector::Zero(2)), Error);
}

TEST(Coefficients, ShiftedEvaluatesRelativeToOrigin) {
    const auto f = builtin::linear_in_distance(Matrix::Identity(2, 2), make_point({0.0, 1.0}), 0.0);
    const auto g = shifted(f, make_point({0.0, 0.5}));
    EXPECT_DOUBLE_EQ(g.a(0.0, Vector::Zero(2))(1, 1), 0.5);
}

}  // namespace
