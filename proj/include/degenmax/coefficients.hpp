#pragma once

#include "degenmax/common.hpp"

#include <functional>
#include <string>
#include <vector>

namespace degenmax {

/// Coefficients of -tr(a D^2 u) - <b, Du> + c u (and -u_t in parabolic mode).
///
/// Every evaluator takes (t, x); elliptic fields ignore t.
struct CoefficientField {
    using MatrixFn = std::function<Matrix(double, const Vector&)>;
    using VectorFn = std::function<Vector(double, const Vector&)>;
    using ScalarFn = std::function<double(double, const Vector&)>;
    using DerivativeFn = std::function<std::vector<Matrix>(double, const Vector&)>;

    int dim = 1;
    bool parabolic = false;
    std::string name = "custom";
    MatrixFn a;
    VectorFn b;
    ScalarFn c;
    /// Optional partials da[k] = d a / d x_k.
    DerivativeFn da;
    double sym_tol = 1e-12;

    Matrix a_at(const Vector& x, double t = 0.0) const { return a(t, x); }
    Vector b_at(const Vector& x, double t = 0.0) const { return b(t, x); }
    double c_at(const Vector& x, double t = 0.0) const { return c(t, x); }
};

/// Throws unless a(t, x) is symmetric with eigenvalues >= -sym_tol.
inline void check_coefficients_at(const CoefficientField& f, const Vector& x, double t = 0.0) {
    const Matrix a = f.a(t, x);
    if (a.rows() != f.dim || a.cols() != f.dim) {
        fail(ErrorKind::Evaluation, "a has wrong shape at " + format_point(x));
    }
    if (!a.allFinite()) fail(ErrorKind::Evaluation, "a is not finite at " + format_point(x));
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > f.sym_tol * std::max(1.0, a.cwiseAbs().maxCoeff())) {
        fail(ErrorKind::Evaluation, "a is not symmetric at " + format_point(x));
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -f.sym_tol) {
        fail(ErrorKind::Evaluation, "a has a negative eigenvalue at " + format_point(x));
    }
}

namespace builtin {

/// -x u'' - (b - x) u' + a u on an interval starting at 0.
inline CoefficientField kummer(double a_param, double b_param) {
    CoefficientField f;
    f.dim = 1;
    f.name = "kummer";
    f.a = [](double, const Vector& x) { return Matrix::Constant(1, 1, x[0]); };
    f.b = [b_param](double, const Vector& x) { return Vector::Constant(1, b_param - x[0]); };
    f.c = [a_param](double, const Vector&) { return a_param; };
    f.da = [](double, const Vector&) { return std::vector<Matrix>{Matrix::Constant(1, 1, 1.0)}; };
    return f;
}

/// -x(1-x) u'' - (c - (a+b+1) x) u' + a b u on (0, 1).
inline CoefficientField hypergeometric(double a_param, double b_param, double c_param) {
    CoefficientField f;
    f.dim = 1;
    f.name = "hypergeometric";
    f.a = [](double, const Vector& x) { return Matrix::Constant(1, 1, x[0] * (1.0 - x[0])); };
    f.b = [=](double, const Vector& x) {
        return Vector::Constant(1, c_param - (a_param + b_param + 1.0) * x[0]);
    };
    f.c = [=](double, const Vector&) { return a_param * b_param; };
    f.da = [](double, const Vector& x) { return std::vector<Matrix>{Matrix::Constant(1, 1, 1.0 - 2.0 * x[0])}; };
    return f;
}

struct HestonParams {
    double kappa = 2.0;
    double theta = 0.04;
    double sigma = 0.3;
    double rho = -0.5;
    double r = 0.03;
    double q = 0.0;
};

/// Log-price x and variance y >= 0; degenerate along y = 0.
inline CoefficientField heston_like(const HestonParams& p) {
    CoefficientField f;
    f.dim = 2;
    f.name = "heston-like";
    Matrix base(2, 2);
    base << 0.5, 0.5 * p.rho * p.sigma, 0.5 * p.rho * p.sigma, 0.5 * p.sigma * p.sigma;
    f.a = [base](double, const Vector& x) -> Matrix { return x[1] * base; };
    f.b = [p](double, const Vector& x) {
        Vector v(2);
        v << p.r - p.q - 0.5 * x[1], p.kappa * (p.theta - x[1]);
        return v;
    };
    f.c = [p](double, const Vector&) { return p.r; };
    f.da = [base](double, const Vector&) { return std::vector<Matrix>{Matrix::Zero(2, 2), base}; };
    return f;
}

inline CoefficientField constant(const Matrix& a0, const Vector& b0, double c0) {
    CoefficientField f;
    f.dim = static_cast<int>(a0.rows());
    f.name = "constant";
    f.a = [a0](double, const Vector&) { return a0; };
    f.b = [b0](double, const Vector&) { return b0; };
    f.c = [c0](double, const Vector&) { return c0; };
    const int d = f.dim;
    f.da = [d](double, const Vector&) { return std::vector<Matrix>(d, Matrix::Zero(d, d)); };
    return f;
}

/// a = (x_d - base) A0 with constant drift and potential; degenerate on {x_d = base}.
inline CoefficientField linear_in_distance(const Matrix& a0, const Vector& b0, double c0, double base = 0.0) {
    CoefficientField f;
    f.dim = static_cast<int>(a0.rows());
    f.name = "linear-in-distance";
    const int d = f.dim;
    f.a = [a0, base, d](double, const Vector& x) -> Matrix { return (x[d - 1] - base) * a0; };
    f.b = [b0](double, const Vector&) { return b0; };
    f.c = [c0](double, const Vector&) { return c0; };
    f.da = [a0, d](double, const Vector&) {
        std::vector<Matrix> out(d, Matrix::Zero(d, d));
        out[d - 1] = a0;
        return out;
    };
    return f;
}

}  // namespace builtin

/// Same field with all evaluators taking coordinates relative to origin.
inline CoefficientField shifted(const CoefficientField& f, const Vector& origin) {
    CoefficientField g = f;
    g.a = [f, origin](double t, const Vector& x) { return f.a(t, x + origin); };
    g.b = [f, origin](double t, const Vector& x) { return f.b(t, x + origin); };
    g.c = [f, origin](double t, const Vector& x) { return f.c(t, x + origin); };
    if (f.da) g.da = [f, origin](double t, const Vector& x) { return f.da(t, x + origin); };
    return g;
}

/// Scalar field with pointwise derivatives, evaluated at (t, x).
struct ScalarField {
    std::function<double(double, const Vector&)> value;
    std::function<Vector(double, const Vector&)> gradient;
    std::function<Matrix(double, const Vector&)> hessian;
    /// Optional; treated as zero when absent.
    std::function<double(double, const Vector&)> time_derivative;
};

inline ScalarField operator+(const ScalarField& u, const ScalarField& v) {
    ScalarField s;
    s.value = [u, v](double t, const Vector& x) { return u.value(t, x) + v.value(t, x); };
    s.gradient = [u, v](double t, const Vector& x) -> Vector { return u.gradient(t, x) + v.gradient(t, x); };
    s.hessian = [u, v](double t, const Vector& x) -> Matrix { return u.hessian(t, x) + v.hessian(t, x); };
    s.time_derivative = [u, v](double t, const Vector& x) {
        double out = 0.0;
        if (u.time_derivative) out += u.time_derivative(t, x);
        if (v.time_derivative) out += v.time_derivative(t, x);
        return out;
    };
    return s;
}

}  // namespace degenmax
