#include "degenmax/coefficient_transform.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using namespace degenmax;

CoefficientField drifting_field(double cross = 0.2) {
    CoefficientField f;
    f.dim = 2;
    f.a = [cross](double, const Vector& x) {
        Matrix a(2, 2);
        a << 1.0, cross, cross, 1.5;
        return Matrix(x[1] * a);
    };
    f.b = [](double, const Vector& x) { return make_point({0.4 + 0.2 * std::sin(3.0 * x[0]), 1.0 + 0.1 * x[0]}); };
    f.c = [](double, const Vector&) { return 0.3; };
    return f;
}

TEST(Transform, IdentityLeavesCoefficientsUnchanged) {
    const auto f = drifting_field();
    const auto op = transform_coefficients(f, identity_map(2), TransformMethod::ChainRuleNumeric);
    const Vector x = make_point({0.1, 0.3});
    EXPECT_LT((op.coeffs.a(0.0, x) - f.a(0.0, x)).norm(), 1e-15);
    EXPECT_LT((op.coeffs.b(0.0, x) - f.b(0.0, x)).norm(), 1e-15);
    EXPECT_EQ(op.coeffs.c(0.0, x), f.c(0.0, x));
}

TEST(Transform, LinearMapIsCongruence) {
    const auto f = drifting_field();
    Matrix R(2, 2);
    R << 2.0, 1.0, 0.0, 1.0;
    const auto op = transform_coefficients(f, linear_map(R), TransformMethod::ChainRuleNumeric);
    const Vector x = make_point({0.2, 0.4});
    const Vector y = R * x;
    EXPECT_LT((op.coeffs.a(0.0, y) - R * f.a(0.0, x) * R.transpose()).norm(), 1e-14);
    EXPECT_LT((op.coeffs.b(0.0, y) - R * f.b(0.0, x)).norm(), 1e-14);
}

TEST(Transform, StraighteningFlattensGraph) {
    const auto gamma = [](double x) { return 0.1 * std::sin(x); };
    const auto phi = straighten_graph_boundary(gamma, [](double x) { return 0.1 * std::cos(x); },
                                               [](double x) { return -0.1 * std::sin(x); });
    for (double x : {-0.5, 0.0, 0.7}) {
        EXPECT_NEAR(phi.forward(0.0, make_point({x, gamma(x)}))[1], 0.0, 1e-16);
        const Vector p = make_point({x, 0.3});
        EXPECT_LT((phi.inverse(0.0, phi.forward(0.0, p)) - p).norm(), 1e-15);
    }
}

TEST(KillingMap, InverseAndJacobianAreConsistent) {
    const auto phi = build_tangential_killing_map(drifting_field(), 0.2);
    const double h = 1e-6;
    for (const Vector& x : {make_point({0.05, 0.1}), make_point({-0.2, 0.15}), make_point({0.3, 0.2})}) {
        EXPECT_LT((phi.inverse(0.0, phi.forward(0.0, x)) - x).norm(), 1e-12);
        Matrix fd(2, 2);
        for (int i = 0; i < 2; ++i) {
            Vector e = Vector::Zero(2);
            e[i] = h;
            fd.col(i) = (phi.forward(0.0, x + e) - phi.forward(0.0, x - e)) / (2.0 * h);
        }
        EXPECT_LT((phi.jacobian(0.0, x) - fd).cwiseAbs().maxCoeff(), 1e-8);
        const auto H = phi.hessian_rows(0.0, x);
        for (int i = 0; i < 2; ++i) {
            Vector e = Vector::Zero(2);
            e[i] = h;
            const Matrix dj = (phi.jacobian(0.0, x + e) - phi.jacobian(0.0, x - e)) / (2.0 * h);
            for (int k = 0; k < 2; ++k) EXPECT_NEAR(H[k](i, 0), dj(k, 0), 1e-6);
        }
    }
}

TEST(KillingMap, BoundaryIdentities) {
    const auto f = drifting_field();
    const auto phi = build_tangential_killing_map(f, 0.2);
    const auto op = transform_coefficients(f, phi, TransformMethod::ChainRuleNumeric);
    for (double s : {-0.15, -0.05, 0.0, 0.1, 0.18}) {
        const Vector y = make_point({s, 0.0});
        EXPECT_LT(std::abs(op.coeffs.b(0.0, y)[0]), 1e-8);
        EXPECT_NEAR(op.coeffs.b(0.0, y)[1], f.b(0.0, y)[1], 1e-14);
        EXPECT_LT(op.coeffs.a(0.0, y).cwiseAbs().maxCoeff(), 1e-10);
    }
    EXPECT_EQ(phi.forward(0.0, make_point({0.1, 0.0}))[0], 0.1);
    EXPECT_EQ(phi.forward(0.0, make_point({0.1, 0.5})), make_point({0.1, 0.5}));
}

TEST(KillingMap, AnalyticAgreesWithChainRuleWithoutCrossDiffusion) {
    const auto f = drifting_field(0.0);
    const auto phi = build_tangential_killing_map(f, 0.2);
    EXPECT_LT(compare_transform_methods(f, phi, 8, 0.2), 1e-6);
}

TEST(KillingMap, CrossDiffusionDiscrepancyIsReported) {
    const auto f = drifting_field(0.2);
    const auto phi = build_tangential_killing_map(f, 0.2);
    const Vector x = make_point({0.05, 0.1});
    const auto an = detail::killing_formulas(f, phi, 0.0, x);
    const auto nu = detail::chain_rule(f, phi, 0.0, x);
    const double xi = phi.killing->xi(0.0, x)[0];
    const double dxi = phi.killing->dxi(0.0, x)(0, 0);
    const double a12 = 0.2 * x[1];
    EXPECT_NEAR(nu.a(0, 0) - an.a(0, 0), a12 * xi * (1.0 + x[1] * dxi), 1e-10);
    EXPECT_NEAR(nu.b[0] - an.b[0], a12 * dxi, 1e-8);
    EXPECT_GT(compare_transform_methods(f, phi, 8, 0.2), 1e-4);
}

TEST(KillingMap, VerificationReportsNamedChecks) {
    const auto f = drifting_field();
    const auto op = transform_coefficients(f, build_tangential_killing_map(f, 0.2), TransformMethod::ChainRuleNumeric);
    const auto v = verify_transform(op, 8);
    for (const char* name : {"a_tilde_zero_on_boundary", "b_tilde_tangential_zero", "b_tilde_d_equals_b_d",
                             "c_tilde_preserved", "a_tilde_symmetric", "inertia_match"}) {
        const auto* c = v.find(name);
        ASSERT_NE(c, nullptr) << name;
        EXPECT_TRUE(c->pass) << name << " worst " << c->worst;
    }
    ASSERT_NE(v.find("eigenvalues_match"), nullptr);
}

TEST(KillingMap, AnalyticMethodNeedsKillingMap) {
    try {
        transform_coefficients(drifting_field(), identity_map(2), TransformMethod::Analytic);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Unsupported);
    }
}

TEST(KillingMap, RejectsNonPositiveNormalDrift) {
    auto f = drifting_field();
    f.b = [](double, const Vector&) { return make_point({0.5, -1.0}); };
    EXPECT_THROW(build_tangential_killing_map(f, 0.2), Error);
}

TEST(Compose, IdentityIsNeutral) {
    const auto phi = build_tangential_killing_map(drifting_field(), 0.2);
    const auto c = compose(identity_map(2), phi);
    const Vector x = make_point({0.07, 0.12});
    EXPECT_LT((c.forward(0.0, x) - phi.forward(0.0, x)).norm(), 1e-15);
    EXPECT_LT((c.jacobian(0.0, x) - phi.jacobian(0.0, x)).norm(), 1e-15);
}

TEST(EvenReflection, MirrorsAcrossBoundary) {
    const auto g = even_reflection(drifting_field());
    EXPECT_EQ(g.b(0.0, make_point({0.1, -0.2})), g.b(0.0, make_point({0.1, 0.2})));
    EXPECT_EQ(g.a(0.0, make_point({0.1, -0.2})), g.a(0.0, make_point({0.1, 0.2})));
}

}  // namespace
