#include "degenmax/special_functions.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

namespace {

using namespace degenmax;
using special::HypergeometricParams;

double M(double a, double b, double x) { return special::kummer_M({a, b}, x); }
double U(double a, double b, double x) { return special::tricomi_U({a, b}, x); }

TEST(KummerM, EqualParametersGiveExponential) {
    for (double x : {-3.0, -0.5, 0.0, 0.3, 1.0, 4.0}) {
        EXPECT_NEAR(M(1.0, 1.0, x), std::exp(x), 1e-14 * std::exp(std::abs(x)));
        EXPECT_NEAR(M(2.7, 2.7, x), std::exp(x), 1e-14 * std::exp(std::abs(x)));
    }
}

TEST(KummerM, ClosedFormsAgainstLibm) {
    for (double x : {0.1, 0.7, 2.0, 5.0}) {
        EXPECT_NEAR(M(1.0, 2.0, x), std::expm1(x) / x, 1e-13 * std::exp(x));
        const double r = std::sqrt(x);
        EXPECT_NEAR(M(0.5, 1.5, -x), std::sqrt(M_PI) / (2.0 * r) * std::erf(r), 1e-13);
    }
}

TEST(KummerM, KummerTransformation) {
    for (double x : {0.2, 0.8}) {
        EXPECT_NEAR(M(0.7, 1.9, x), std::exp(x) * M(1.2, 1.9, -x), 1e-13);
    }
}

TEST(KummerM, DerivativeMatchesFiniteDifference) {
    const double h = 1e-5;
    for (double x : {0.3, 1.2, 2.5}) {
        const double fd = (M(0.6, 1.7, x + h) - M(0.6, 1.7, x - h)) / (2.0 * h);
        EXPECT_NEAR(special::kummer_M_derivative({0.6, 1.7}, x), fd, 1e-8);
    }
}

TEST(KummerM, RejectsPoleParameter) {
    EXPECT_THROW(M(1.0, -2.0, 0.5), Error);
}

TEST(KummerM, TruncationIsReported) {
    HypergeometricParams p{1.0, 1.0};
    p.max_terms = 3;
    EXPECT_THROW(special::kummer_M(p, 5.0), special::SeriesTruncationError);
}

TEST(TricomiU, HalfHalfMatchesErfc) {
    for (double x : {0.05, 0.5, 1.0, 3.0}) {
        const double oracle = std::sqrt(M_PI) * std::exp(x) * std::erfc(std::sqrt(x));
        EXPECT_NEAR(U(0.5, 0.5, x), oracle, 1e-12 * oracle);
    }
}

TEST(TricomiU, PowerClosedForm) {
    for (double x : {0.1, 1.0, 6.0}) {
        EXPECT_NEAR(U(0.3, 1.3, x), std::pow(x, -0.3), 1e-13 * std::pow(x, -0.3));
    }
}

TEST(TricomiU, TerminatingPolynomial) {
    const double b = 1.7;
    for (double x : {0.2, 1.5, 3.0}) {
        EXPECT_NEAR(U(-2.0, b, x), x * x - 2.0 * (b + 1.0) * x + b * (b + 1.0), 1e-12);
    }
    EXPECT_EQ(U(0.0, 3.0, 2.0), 1.0);
}

TEST(TricomiU, WronskianWithM) {
    for (auto [a, b] : {std::pair{0.4, 1.3}, {1.2, 0.6}, {0.7, 2.5}}) {
        for (double x : {0.3, 1.0, 2.0}) {
            const double w = M(a, b, x) * special::tricomi_U_derivative({a, b}, x) -
                             special::kummer_M_derivative({a, b}, x) * U(a, b, x);
            const double oracle = -std::tgamma(b) / std::tgamma(a) * std::pow(x, -b) * std::exp(x);
            EXPECT_NEAR(w, oracle, 1e-10 * std::abs(oracle)) << a << " " << b << " " << x;
        }
    }
}

TEST(TricomiU, PreconditionsAndUnsupportedBranches) {
    EXPECT_THROW(U(0.5, 1.5, 0.0), Error);
    EXPECT_THROW(U(0.5, 1.5, -1.0), Error);
    try {
        U(0.5, 2.0, 1.0);
        FAIL() << "integer b outside the closed forms must be rejected";
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Unsupported);
    }
}

TEST(SpecialFunctions, GammaPolesAndPochhammer) {
    EXPECT_THROW(special::gamma_fn(-2.0), Error);
    EXPECT_EQ(special::reciprocal_gamma(0.0), 0.0);
    EXPECT_DOUBLE_EQ(special::pochhammer(2.5, 3), 2.5 * 3.5 * 4.5);
    EXPECT_DOUBLE_EQ(special::pochhammer(7.0, 0), 1.0);
}

TEST(SpecialFunctions, RegularityTable) {
    using special::URegularity;
    EXPECT_EQ(special::classify_U_regularity(0.0, 2.5), URegularity::C_inf);
    EXPECT_EQ(special::classify_U_regularity(0.5, 0.5), URegularity::C0_not_C1);
    EXPECT_EQ(special::classify_U_regularity(0.3, 2.5), URegularity::not_C0);
    EXPECT_EQ(special::classify_U_regularity(0.5, 1.5), URegularity::not_C0);
    EXPECT_THROW(special::classify_U_regularity(-1.0, 1.0), Error);
}

TEST(SpecialFunctionsProperty, RandomParametersSatisfyKummerEquation) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> ua(0.1, 3.0), ub(0.2, 4.0), ux(0.05, 3.0);
    for (int k = 0; k < 200; ++k) {
        const double a = ua(rng), b = ub(rng), x = ux(rng);
        const double m = M(a, b, x);
        const double m1 = a / b * M(a + 1, b + 1, x);
        const double m2 = a * (a + 1) / (b * (b + 1)) * M(a + 2, b + 2, x);
        const double res = -x * m2 - (b - x) * m1 + a * m;
        EXPECT_LT(std::abs(res), 1e-10 * std::max(1.0, std::abs(m))) << a << " " << b << " " << x;
        if (special::is_integer(b)) continue;
        const double u = U(a, b, x);
        const double u1 = -a * U(a + 1, b + 1, x);
        const double u2 = a * (a + 1) * U(a + 2, b + 2, x);
        const double ru = -x * u2 - (b - x) * u1 + a * u;
        EXPECT_LT(std::abs(ru), 1e-8 * std::max({1.0, std::abs(u), std::abs(x * u2)})) << a << " " << b << " " << x;
    }
}

}  // namespace
