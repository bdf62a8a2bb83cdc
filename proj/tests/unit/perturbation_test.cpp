#include "degenmax/perturbation.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using namespace degenmax;

BoundaryMaxData sample_data() {
    BoundaryMaxData d;
    d.p = -1.0;
    d.r = 0.0;
    d.b0 = 1.0;
    d.K = 1.0;
    d.ell = 0.5;
    d.rho0 = 0.5;
    d.tau = 0.5;
    return d;
}

ScalarField quadratic_u(bool with_time) {
    ScalarField u;
    u.value = [with_time](double t, const Vector& x) {
        return -x[1] - 0.5 * x[0] * x[0] - (with_time ? t : 0.0);
    };
    u.gradient = [](double, const Vector& x) { return make_point({-x[0], -1.0}); };
    u.hessian = [](double, const Vector&) {
        Matrix h = Matrix::Zero(2, 2);
        h(0, 0) = -1.0;
        return h;
    };
    u.time_derivative = [with_time](double, const Vector&) { return with_time ? -1.0 : 0.0; };
    return u;
}

TEST(Perturbation, ConstantMFormula) {
    EXPECT_DOUBLE_EQ(perturbation_m(1.0, 1.0, PerturbationMode::Elliptic), 24.0);
    EXPECT_DOUBLE_EQ(perturbation_m(2.0, 1.0, PerturbationMode::Parabolic), 40.0);
}

TEST(Perturbation, SelectedConstantsMeetInequalities) {
    const auto d = sample_data();
    const auto s = select_constants(d, quadratic_u(false), 2, PerturbationMode::Elliptic);
    EXPECT_DOUBLE_EQ(s.m, 24.0);
    EXPECT_NEAR(s.eta, 1.0 / 384.0, 1e-15);
    EXPECT_NEAR(s.x_hat_d, (s.eta - d.p) / (s.m * s.Q), 1e-15);
    EXPECT_LE(s.x_hat_d, d.ell * (1.0 + 1e-12));
    EXPECT_LE(s.x_hat_d, d.rho0);
    EXPECT_LE(-d.p / (8.0 * s.m * s.Q), d.rho0);
    EXPECT_LT(s.max_remainder, s.remainder_bound);
    EXPECT_EQ(s.zeta, 0.0);
}

TEST(Perturbation, ParabolicZeta) {
    const auto d = sample_data();
    const auto s = select_constants(d, quadratic_u(true), 2, PerturbationMode::Parabolic);
    EXPECT_NEAR(s.zeta, -d.b0 * d.p / 16.0, 1e-15);
    EXPECT_LE(s.x_hat_d, std::min(s.zeta * d.tau / 4.0, d.tau / 2.0) * (1.0 + 1e-12));
}

TEST(Perturbation, DataValidation) {
    auto d = sample_data();
    d.p = 0.1;
    EXPECT_THROW(select_constants(d, quadratic_u(false), 2, PerturbationMode::Elliptic), Error);
    d = sample_data();
    d.b0 = 0.0;
    EXPECT_THROW(select_constants(d, quadratic_u(false), 2, PerturbationMode::Elliptic), Error);
    d = sample_data();
    d.tau = 0.0;
    EXPECT_THROW(select_constants(d, quadratic_u(true), 2, PerturbationMode::Parabolic), Error);
    d = sample_data();
    d.Lambda0 = 1.0;
    EXPECT_THROW(select_constants(d, quadratic_u(false), 2, PerturbationMode::Elliptic), Error);
}

TEST(Perturbation, WShapeAtOrigin) {
    const auto d = sample_data();
    const auto s = select_constants(d, quadratic_u(false), 2, PerturbationMode::Elliptic);
    const auto w = build_w(s, d);
    const Vector o = Vector::Zero(2);
    EXPECT_EQ(w.value(0.0, o), 0.0);
    EXPECT_NEAR(w.gradient(0.0, o)[1], s.eta - d.p, 1e-15);
    EXPECT_NEAR(w.hessian(0.0, o)(0, 0), -s.Q, 1e-15);
    const Vector x = make_point({0.1, 0.2});
    EXPECT_NEAR(w.value(0.0, x), (s.eta - d.p) * 0.2 - 0.5 * s.Q * 0.05, 1e-15);
}

TEST(Perturbation, CylinderRadiusProfile) {
    const auto d = sample_data();
    const auto s = select_constants(d, quadratic_u(false), 2, PerturbationMode::Elliptic);
    CylinderReport rep;
    const CutCylinder cyl = build_cylinder(s, d, &rep);
    EXPECT_DOUBLE_EQ(cyl.radius(0.0), d.rho0);
    EXPECT_LE(cyl.radius(s.x_hat_d), d.rho0);
    EXPECT_TRUE(rep.continuous);
    for (int k = 0; k <= 20; ++k) EXPECT_GE(cyl.radius(s.x_hat_d * k / 20.0), 0.0);
}

TEST(Hopf, NormalDerivativeSign) {
    const auto u = quadratic_u(false);
    const auto h = hopf_check(u, Vector::Zero(2), make_point({0.0, 1.0}), 1e-3);
    EXPECT_NEAR(h.normal_derivative, -1.0, 1e-12);
    EXPECT_TRUE(h.pass);
    ScalarField flat;
    flat.value = [](double, const Vector&) { return 2.0; };
    EXPECT_FALSE(hopf_check(flat, Vector::Zero(2), make_point({0.0, 1.0}), 1e-3).pass);
    EXPECT_THROW(hopf_check(flat, Vector::Zero(2), make_point({0.0, 1.0}), 0.0), Error);
}

TEST(Certificate, SamplesAndSweepsAreReported) {
    const auto d = sample_data();
    const auto u = quadratic_u(false);
    const auto s = select_constants(d, u, 2, PerturbationMode::Elliptic);
    auto coeffs = builtin::linear_in_distance(Matrix::Identity(2, 2), make_point({0.0, 1.0}), 0.0);
    const auto cert = certify(s, d, coeffs, u, 40);
    EXPECT_GE(cert.interior_samples, 1000u);
    EXPECT_FALSE(cert.sweeps.empty());
    EXPECT_NEAR(cert.hopf_derivative, -1.0, 1e-6);
    EXPECT_EQ(cert.passed, cert.failures.empty());
    ScalarField v = u + build_w(s, d);
    EXPECT_NEAR(apply_operator(coeffs, v, Vector::Zero(2)), -d.b0 * s.eta, 1e-12);
}

}  // namespace
