#pragma once

#include "degenmax/coefficients.hpp"
#include "degenmax/common.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace degenmax {

/// Data of the drift-killing map y = x + psi(|x|/delta) xi(x') x_d.
struct KillingMapData {
    double delta = 0.0;
    /// xi(t, x) depends on x' only; the normal component is 0.
    std::function<Vector(double, const Vector&)> xi;
    /// dxi(t, x)(i, m) = d xi^i / d x_m.
    std::function<Matrix(double, const Vector&)> dxi;
    /// d2xi(t, x)[i](m, n) = d^2 xi^i / d x_m d x_n.
    std::function<std::vector<Matrix>(double, const Vector&)> d2xi;
    /// d xi / d t, zero for time-independent drifts.
    std::function<Vector(double, const Vector&)> dxi_dt;
};

/// Point map y = Phi(t, x) with derivatives; elliptic maps ignore t.
struct Diffeomorphism {
    int dim = 1;
    std::function<Vector(double, const Vector&)> forward;
    std::function<Vector(double, const Vector&)> inverse;
    /// jacobian(t, x)(k, i) = d y_k / d x_i.
    std::function<Matrix(double, const Vector&)> jacobian;
    /// Optional; hessian_rows(t, x)[k](i, j) = d^2 y_k / d x_i d x_j.
    std::function<std::vector<Matrix>(double, const Vector&)> hessian_rows;
    bool time_coupled = false;
    /// d y / d t at fixed x, used when time_coupled.
    std::function<Vector(double, const Vector&)> time_derivative;
    double patch_diameter = 1.0;
    std::shared_ptr<const KillingMapData> killing;
};

inline Diffeomorphism identity_map(int dim) {
    Diffeomorphism phi;
    phi.dim = dim;
    phi.forward = [](double, const Vector& x) { return x; };
    phi.inverse = [](double, const Vector& y) { return y; };
    phi.jacobian = [dim](double, const Vector&) -> Matrix { return Matrix::Identity(dim, dim); };
    phi.hessian_rows = [dim](double, const Vector&) { return std::vector<Matrix>(dim, Matrix::Zero(dim, dim)); };
    return phi;
}

/// Linear map y = R x (R invertible).
inline Diffeomorphism linear_map(const Matrix& R) {
    const int dim = static_cast<int>(R.rows());
    const Matrix Rinv = R.inverse();
    Diffeomorphism phi;
    phi.dim = dim;
    phi.forward = [R](double, const Vector& x) -> Vector { return R * x; };
    phi.inverse = [Rinv](double, const Vector& y) -> Vector { return Rinv * y; };
    phi.jacobian = [R](double, const Vector&) -> Matrix { return R; };
    phi.hessian_rows = [dim](double, const Vector&) { return std::vector<Matrix>(dim, Matrix::Zero(dim, dim)); };
    return phi;
}

/// Shear (x', x_d) -> (x', x_d - gamma(x')) flattening a graph boundary in 2D.
inline Diffeomorphism straighten_graph_boundary(const std::function<double(double)>& gamma,
                                                const std::function<double(double)>& slope,
                                                const std::function<double(double)>& curvature,
                                                double patch_diameter = 1.0) {
    Diffeomorphism phi;
    phi.dim = 2;
    phi.patch_diameter = patch_diameter;
    phi.forward = [gamma](double, const Vector& x) {
        Vector y = x;
        y[1] = x[1] - gamma(x[0]);
        return y;
    };
    phi.inverse = [gamma](double, const Vector& y) {
        Vector x = y;
        x[1] = y[1] + gamma(y[0]);
        return x;
    };
    phi.jacobian = [slope](double, const Vector& x) {
        Matrix j = Matrix::Identity(2, 2);
        j(1, 0) = -slope(x[0]);
        return j;
    };
    if (curvature) {
        phi.hessian_rows = [curvature](double, const Vector& x) {
            std::vector<Matrix> h(2, Matrix::Zero(2, 2));
            h[1](0, 0) = -curvature(x[0]);
            return h;
        };
    }
    return phi;
}

namespace detail {

/// Smooth cutoff 1 - S(s - 1) with S(t) = f(t) / (f(t) + f(1 - t)), f(t) = exp(-1/t); returns value and two derivatives.
inline std::array<double, 3> cutoff(double s) {
    if (s <= 1.0) return {1.0, 0.0, 0.0};
    if (s >= 2.0) return {0.0, 0.0, 0.0};
    const double t = s - 1.0;
    auto f = [](double z) -> std::array<double, 3> {
        const double e = std::exp(-1.0 / z);
        return {e, e / (z * z), e * (1.0 / (z * z * z * z) - 2.0 / (z * z * z))};
    };
    const auto A = f(t);
    const auto Bf = f(1.0 - t);
    const double B = Bf[0], dB = -Bf[1], d2B = Bf[2];
    const double D = A[0] + B;
    const double dD = A[1] + dB;
    const double N = A[1] * B - A[0] * dB;
    const double dN = A[2] * B - A[0] * d2B;
    const double S = A[0] / D;
    const double dS = N / (D * D);
    const double d2S = (dN * D - 2.0 * N * dD) / (D * D * D);
    return {1.0 - S, -dS, -d2S};
}

inline Vector newton_inverse(const Diffeomorphism& phi, double t, const Vector& y) {
    Vector x = y;
    for (int it = 0; it < 100; ++it) {
        const Vector r = phi.forward(t, x) - y;
        if (r.lpNorm<Eigen::Infinity>() <= 1e-15 * std::max(1.0, y.lpNorm<Eigen::Infinity>())) return x;
        x -= phi.jacobian(t, x).lu().solve(r);
    }
    if ((phi.forward(t, x) - y).norm() > 1e-10 * std::max(1.0, y.norm())) {
        fail(ErrorKind::Convergence, "inverse map did not converge at " + format_point(y));
    }
    return x;
}

}  // namespace detail

/// Even reflection of the coefficients across {x_d = 0}: evaluators see (x', |x_d|).
inline CoefficientField even_reflection(const CoefficientField& f) {
    CoefficientField g = f;
    auto fold = [](const Vector& x) {
        Vector y = x;
        y[y.size() - 1] = std::abs(y[y.size() - 1]);
        return y;
    };
    g.a = [f, fold](double t, const Vector& x) { return f.a(t, fold(x)); };
    g.b = [f, fold](double t, const Vector& x) { return f.b(t, fold(x)); };
    g.c = [f, fold](double t, const Vector& x) { return f.c(t, fold(x)); };
    g.da = nullptr;
    return g;
}

/// Half the radius at which b^d first drops below b^d(0)/2 on the half-ball, capped by max_radius / 2.
inline double default_killing_delta(const CoefficientField& coeffs, double max_radius, double t = 0.0) {
    const int d = coeffs.dim;
    const Vector origin = Vector::Zero(d);
    const double b0 = coeffs.b(t, origin)[d - 1];
    if (!(b0 > 0.0)) fail(ErrorKind::Precondition, "b^d(0) must be positive");
    const int radial = 200;
    const int angular = 64;
    for (int k = 1; k <= radial; ++k) {
        const double r = max_radius * k / radial;
        for (int j = 0; j <= angular; ++j) {
            const double th = M_PI * j / angular;
            Vector x = Vector::Zero(d);
            if (d == 2) x << r * std::cos(th), r * std::sin(th);
            else x[0] = r;
            if (coeffs.b(t, x)[d - 1] < 0.5 * b0) return 0.5 * r;
        }
    }
    return 0.5 * max_radius;
}

/// Coordinate change removing the tangential drift on {x_d = 0} near the origin (2D straightened frame).
inline Diffeomorphism build_tangential_killing_map(const CoefficientField& coeffs, double delta, double t_probe = 0.0) {
    const int d = coeffs.dim;
    if (d != 1 && d != 2) fail(ErrorKind::Precondition, "killing map supports dimensions 1 and 2");
    if (!(delta > 0.0)) fail(ErrorKind::Precondition, "delta must be positive");
    if (d == 1) {
        Diffeomorphism id = identity_map(1);
        auto data = std::make_shared<KillingMapData>();
        data->delta = delta;
        data->xi = [](double, const Vector&) { return Vector::Zero(1); };
        data->dxi = [](double, const Vector&) { return Matrix::Zero(1, 1); };
        data->d2xi = [](double, const Vector&) { return std::vector<Matrix>{Matrix::Zero(1, 1)}; };
        data->dxi_dt = [](double, const Vector&) { return Vector::Zero(1); };
        id.killing = data;
        return id;
    }
    const CoefficientField ext = even_reflection(coeffs);
    auto xi_scalar = [ext](double t, double s) {
        Vector p(2);
        p << s, 0.0;
        const Vector b = ext.b(t, p);
        return -b[0] / b[1];
    };
    for (int k = 0; k <= 400; ++k) {
        const double s = -2.0 * delta + 4.0 * delta * k / 400.0;
        Vector p(2);
        p << s, 0.0;
        if (!(ext.b(t_probe, p)[1] > 0.0)) {
            fail(ErrorKind::Precondition, "b^d is not positive at " + format_point(p));
        }
    }
    const double h1 = 1e-3 * delta;
    const double h2 = 1e-2 * delta;
    auto data = std::make_shared<KillingMapData>();
    data->delta = delta;
    data->xi = [xi_scalar](double t, const Vector& x) {
        Vector v = Vector::Zero(2);
        v[0] = xi_scalar(t, x[0]);
        return v;
    };
    data->dxi = [xi_scalar, h1](double t, const Vector& x) {
        const double s = x[0];
        Matrix m = Matrix::Zero(2, 2);
        m(0, 0) = (-xi_scalar(t, s + 2 * h1) + 8 * xi_scalar(t, s + h1) - 8 * xi_scalar(t, s - h1) +
                   xi_scalar(t, s - 2 * h1)) /
                  (12 * h1);
        return m;
    };
    data->d2xi = [xi_scalar, h2](double t, const Vector& x) {
        const double s = x[0];
        std::vector<Matrix> out(2, Matrix::Zero(2, 2));
        out[0](0, 0) = (-xi_scalar(t, s + 2 * h2) + 16 * xi_scalar(t, s + h2) - 30 * xi_scalar(t, s) +
                        16 * xi_scalar(t, s - h2) - xi_scalar(t, s - 2 * h2)) /
                       (12 * h2 * h2);
        return out;
    };
    const bool time_coupled = coeffs.parabolic;
    data->dxi_dt = [xi_scalar, time_coupled, delta](double t, const Vector& x) {
        Vector v = Vector::Zero(2);
        if (time_coupled) {
            const double ht = 1e-4 * std::max(1.0, delta);
            v[0] = (xi_scalar(t + ht, x[0]) - xi_scalar(t - ht, x[0])) / (2.0 * ht);
        }
        return v;
    };

    Diffeomorphism phi;
    phi.dim = 2;
    phi.patch_diameter = 4.0 * delta;
    phi.time_coupled = time_coupled;
    phi.killing = data;
    phi.forward = [data](double t, const Vector& x) {
        const double g = detail::cutoff(x.norm() / data->delta)[0];
        return Vector(x + g * data->xi(t, x) * x[1]);
    };
    phi.jacobian = [data](double t, const Vector& x) {
        const double r = x.norm();
        const auto c = detail::cutoff(r / data->delta);
        Vector grad_g = Vector::Zero(2);
        if (r > 0.0) grad_g = c[1] / (data->delta * r) * x;
        const Vector xi = data->xi(t, x);
        const Matrix dxi = data->dxi(t, x);
        Matrix j = Matrix::Identity(2, 2);
        for (int k = 0; k < 2; ++k) {
            for (int i = 0; i < 2; ++i) {
                j(k, i) += grad_g[i] * xi[k] * x[1] + c[0] * dxi(k, i) * x[1] + (i == 1 ? c[0] * xi[k] : 0.0);
            }
        }
        return j;
    };
    phi.hessian_rows = [data](double t, const Vector& x) {
        const double r = x.norm();
        const auto c = detail::cutoff(r / data->delta);
        Vector gi = Vector::Zero(2);
        Matrix gij = Matrix::Zero(2, 2);
        if (r > 0.0 && (c[1] != 0.0 || c[2] != 0.0)) {
            const double dl = data->delta;
            gi = c[1] / (dl * r) * x;
            const Matrix xx = x * x.transpose() / (r * r);
            gij = c[2] / (dl * dl) * xx + c[1] / (dl * r) * (Matrix::Identity(2, 2) - xx);
        }
        const Vector xi = data->xi(t, x);
        const Matrix dxi = data->dxi(t, x);
        const std::vector<Matrix> d2 = data->d2xi(t, x);
        const double e = x[1];
        auto de = [](int i) { return i == 1 ? 1.0 : 0.0; };
        std::vector<Matrix> h(2, Matrix::Zero(2, 2));
        for (int k = 0; k < 2; ++k) {
            for (int i = 0; i < 2; ++i) {
                for (int j = 0; j < 2; ++j) {
                    h[k](i, j) = gij(i, j) * xi[k] * e + gi[i] * dxi(k, j) * e + gi[i] * xi[k] * de(j) +
                                 gi[j] * dxi(k, i) * e + c[0] * d2[k](i, j) * e + c[0] * dxi(k, i) * de(j) +
                                 gi[j] * xi[k] * de(i) + c[0] * dxi(k, j) * de(i);
                }
            }
        }
        return h;
    };
    phi.time_derivative = [data](double t, const Vector& x) {
        const double g = detail::cutoff(x.norm() / data->delta)[0];
        return Vector(g * data->dxi_dt(t, x) * x[1]);
    };
    phi.inverse = [phi_copy = phi](double t, const Vector& y) { return detail::newton_inverse(phi_copy, t, y); };

    for (int k = 0; k <= 40; ++k) {
        for (int j = 0; j <= 20; ++j) {
            const double r = 2.0 * delta * k / 40.0;
            const double th = M_PI * j / 20.0;
            Vector x(2);
            x << r * std::cos(th), r * std::sin(th);
            if (phi.jacobian(t_probe, x).determinant() <= 1e-6) {
                fail(ErrorKind::Precondition, "jacobian singular at " + format_point(x) + "; choose a smaller delta");
            }
        }
    }
    return phi;
}

/// Composition phi2 o phi1.
inline Diffeomorphism compose(const Diffeomorphism& phi2, const Diffeomorphism& phi1) {
    Diffeomorphism c;
    c.dim = phi1.dim;
    c.patch_diameter = std::min(phi1.patch_diameter, phi2.patch_diameter);
    c.forward = [=](double t, const Vector& x) { return phi2.forward(t, phi1.forward(t, x)); };
    c.inverse = [=](double t, const Vector& y) { return phi1.inverse(t, phi2.inverse(t, y)); };
    c.jacobian = [=](double t, const Vector& x) -> Matrix {
        return phi2.jacobian(t, phi1.forward(t, x)) * phi1.jacobian(t, x);
    };
    if (phi1.hessian_rows && phi2.hessian_rows) {
        c.hessian_rows = [=](double t, const Vector& x) {
            const Vector y1 = phi1.forward(t, x);
            const Matrix j1 = phi1.jacobian(t, x);
            const Matrix j2 = phi2.jacobian(t, y1);
            const auto h1 = phi1.hessian_rows(t, x);
            const auto h2 = phi2.hessian_rows(t, y1);
            std::vector<Matrix> out;
            for (int k = 0; k < c.dim; ++k) {
                Matrix m = j1.transpose() * h2[k] * j1;
                for (int l = 0; l < c.dim; ++l) m += j2(k, l) * h1[l];
                out.push_back(m);
            }
            return out;
        };
    }
    c.time_coupled = phi1.time_coupled || phi2.time_coupled;
    if (c.time_coupled) {
        c.time_derivative = [=](double t, const Vector& x) -> Vector {
            const Vector y1 = phi1.forward(t, x);
            Vector out = Vector::Zero(c.dim);
            if (phi2.time_coupled) out += phi2.time_derivative(t, y1);
            if (phi1.time_coupled) out += phi2.jacobian(t, y1) * phi1.time_derivative(t, x);
            return out;
        };
    }
    return c;
}

enum class TransformMethod { Analytic, ChainRuleNumeric };

inline const char* to_string(TransformMethod m) {
    return m == TransformMethod::Analytic ? "analytic" : "chain_rule_numeric";
}

struct TransformedOperator {
    CoefficientField coeffs;
    CoefficientField source;
    Diffeomorphism phi;
    TransformMethod method = TransformMethod::ChainRuleNumeric;
};

namespace detail {

inline std::vector<Matrix> hessian_rows_or_fd(const Diffeomorphism& phi, double t, const Vector& x) {
    if (phi.hessian_rows) return phi.hessian_rows(t, x);
    const int d = phi.dim;
    const double h = 1e-4 * phi.patch_diameter;
    std::vector<Matrix> out(d, Matrix::Zero(d, d));
    for (int j = 0; j < d; ++j) {
        Vector e = Vector::Zero(d);
        e[j] = h;
        const Matrix dj = (phi.jacobian(t, x + e) - phi.jacobian(t, x - e)) / (2.0 * h);
        for (int k = 0; k < d; ++k) out[k].col(j) = dj.row(k).transpose();
    }
    for (auto& m : out) m = 0.5 * (m + m.transpose());
    return out;
}

struct TildeCoefficients {
    Matrix a;
    Vector b;
    double c;
};

inline TildeCoefficients chain_rule(const CoefficientField& f, const Diffeomorphism& phi, double t, const Vector& x) {
    const Matrix J = phi.jacobian(t, x);
    const auto H = hessian_rows_or_fd(phi, t, x);
    const Matrix a = f.a(t, x);
    TildeCoefficients out;
    out.a = J * a * J.transpose();
    out.a = 0.5 * (out.a + out.a.transpose());
    out.b = J * f.b(t, x);
    for (int k = 0; k < phi.dim; ++k) out.b[k] += (a.array() * H[k].array()).sum();
    if (phi.time_coupled && f.parabolic && phi.time_derivative) out.b += phi.time_derivative(t, x);
    out.c = f.c(t, x);
    return out;
}

/// Transformed coefficients of the killing map written out term by term, valid where the cutoff is 1.
inline TildeCoefficients killing_formulas(const CoefficientField& f, const Diffeomorphism& phi, double t,
                                          const Vector& x) {
    const KillingMapData& km = *phi.killing;
    if (x.norm() > km.delta * (1.0 + 1e-12)) {
        fail(ErrorKind::Precondition, "analytic formulas hold only within delta of the base point");
    }
    const int d = f.dim;
    const int D = d - 1;
    const Matrix a = f.a(t, x);
    const Vector b = f.b(t, x);
    const Vector xi = km.xi(t, x);
    const Matrix dxi = km.dxi(t, x);
    const auto d2xi = km.d2xi(t, x);
    const double xd = x[D];
    TildeCoefficients out;
    out.a = Matrix::Zero(d, d);
    for (int i = 0; i < D; ++i) {
        for (int j = 0; j < D; ++j) {
            double v = a(i, j);
            for (int n = 0; n < D; ++n) v += xd * a(i, n) * dxi(j, n);
            for (int m = 0; m < D; ++m) v += xd * a(m, j) * dxi(i, m);
            for (int m = 0; m < D; ++m)
                for (int n = 0; n < D; ++n) v += xd * xd * a(m, n) * dxi(i, m) * dxi(j, n);
            v += 0.5 * (a(i, D) * xi[j] + a(j, D) * xi[i]);
            for (int m = 0; m < D; ++m) v += xd * a(m, D) * dxi(i, m) * xi[j];
            v += a(D, D) * xi[i] * xi[j];
            out.a(i, j) = v;
        }
        double v = a(i, D) + xi[i] * a(D, D);
        for (int m = 0; m < D; ++m) v += xd * a(m, D) * dxi(i, m);
        out.a(i, D) = v;
        out.a(D, i) = v;
    }
    out.a(D, D) = a(D, D);
    out.b = b;
    for (int j = 0; j < D; ++j) {
        double v = b[j];
        for (int k = 0; k < D; ++k) v += xd * b[j] * dxi(k, j);
        v += xi[j] * b[D];
        for (int m = 0; m < D; ++m)
            for (int n = 0; n < D; ++n) v += xd * a(m, n) * d2xi[j](m, n);
        for (int m = 0; m < D; ++m) v += a(m, D) * dxi(j, m);
        if (phi.time_coupled && f.parabolic && km.dxi_dt) v += km.dxi_dt(t, x)[j] * xd;
        out.b[j] = v;
    }
    out.b[D] = b[D];
    out.c = f.c(t, x);
    return out;
}

}  // namespace detail

/// Coefficients of the operator in y = Phi(x); every evaluator maps y back through Phi^{-1}.
inline TransformedOperator transform_coefficients(const CoefficientField& coeffs, const Diffeomorphism& phi,
                                                  TransformMethod method) {
    if (coeffs.dim != phi.dim) fail(ErrorKind::Precondition, "map and coefficient dimensions differ");
    if (method == TransformMethod::Analytic && !phi.killing) {
        fail(ErrorKind::Unsupported, "analytic formulas exist only for the tangential killing map");
    }
    TransformedOperator op;
    op.source = coeffs;
    op.phi = phi;
    op.method = method;
    auto eval = [coeffs, phi, method](double t, const Vector& y) {
        const Vector x = phi.inverse(t, y);
        return method == TransformMethod::Analytic ? detail::killing_formulas(coeffs, phi, t, x)
                                                   : detail::chain_rule(coeffs, phi, t, x);
    };
    CoefficientField& f = op.coeffs;
    f.dim = coeffs.dim;
    f.parabolic = coeffs.parabolic;
    f.name = coeffs.name + " (transformed)";
    f.sym_tol = coeffs.sym_tol;
    f.a = [eval](double t, const Vector& y) { return eval(t, y).a; };
    f.b = [eval](double t, const Vector& y) { return eval(t, y).b; };
    f.c = [coeffs, phi](double t, const Vector& y) { return coeffs.c(t, phi.inverse(t, y)); };
    return op;
}

struct TransformCheck {
    std::string name;
    bool pass = true;
    double worst = 0.0;
    Vector witness;
};

struct TransformVerification {
    std::vector<TransformCheck> checks;
    bool passed = true;

    const TransformCheck* find(const std::string& name) const {
        for (const auto& c : checks) if (c.name == name) return &c;
        return nullptr;
    }
};

struct VerifyOptions {
    double patch_radius = 0.0;  ///< 0 selects the killing map's delta.
    double zero_tol = 1e-10;
    double tangential_tol = 1e-8;
    double eigen_rel_tol = 1e-8;
    double time = 0.0;
};

namespace detail {

inline std::pair<int, int> inertia(const Eigen::VectorXd& ev, double tol) {
    int pos = 0, neg = 0;
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        if (ev[i] > tol) ++pos;
        else if (ev[i] < -tol) ++neg;
    }
    return {pos, neg};
}

}  // namespace detail

/// Checks the boundary identities of the transformed coefficients and compares spectra in the interior.
inline TransformVerification verify_transform(const TransformedOperator& op, int sample_count,
                                              const VerifyOptions& o = {}) {
    const int d = op.coeffs.dim;
    const int D = d - 1;
    const double t = o.time;
    double patch = o.patch_radius;
    if (patch <= 0.0) patch = op.phi.killing ? op.phi.killing->delta : 0.25 * op.phi.patch_diameter;
    TransformVerification rep;
    auto named = [](const char* name) {
        TransformCheck c;
        c.name = name;
        return c;
    };
    TransformCheck a_zero = named("a_tilde_zero_on_boundary"), bperp = named("b_tilde_perp_positive"),
                   bpar = named("b_tilde_tangential_zero"), bd_equal = named("b_tilde_d_equals_b_d"),
                   c_equal = named("c_tilde_preserved"), eig = named("eigenvalues_match"),
                   inert = named("inertia_match"), sym = named("a_tilde_symmetric");
    auto note = [](TransformCheck& c, double value, bool bad, const Vector& at) {
        if (value > c.worst || (bad && c.pass)) {
            c.worst = std::max(c.worst, value);
            if (bad || c.witness.size() == 0) c.witness = at;
        }
        if (bad) c.pass = false;
    };
    const int nb = std::max(2, sample_count);
    for (int k = 0; k < nb; ++k) {
        Vector y = Vector::Zero(d);
        if (d == 2) y[0] = -patch + 2.0 * patch * k / (nb - 1);
        const Vector x = op.phi.inverse(t, y);
        const Matrix at = op.coeffs.a(t, y);
        const Vector bt = op.coeffs.b(t, y);
        const double an = at.cwiseAbs().maxCoeff();
        note(a_zero, an, !(an < o.zero_tol), y);
        note(bperp, std::max(0.0, -bt[D]), !(bt[D] > 0.0), y);
        double tang = 0.0;
        for (int i = 0; i < D; ++i) tang = std::max(tang, std::abs(bt[i]));
        note(bpar, tang, !(tang < o.tangential_tol), y);
    }
    const int ni = std::max(2, sample_count);
    for (int k = 0; k < ni; ++k) {
        for (int j = 0; j < (d == 2 ? ni : 1); ++j) {
            Vector y = Vector::Zero(d);
            const double rad = patch * (k + 0.5) / ni;
            if (d == 2) {
                const double th = M_PI * (j + 0.5) / ni;
                y << rad * std::cos(th), rad * std::sin(th);
            } else {
                y[0] = rad;
            }
            const Vector x = op.phi.inverse(t, y);
            const Matrix at = op.coeffs.a(t, y);
            const Matrix a = op.source.a(t, x);
            const Vector bt = op.coeffs.b(t, y);
            const Vector b = op.source.b(t, x);
            const double dd = std::abs(bt[D] - b[D]);
            note(bd_equal, dd, dd != 0.0, y);
            const double dc = std::abs(op.coeffs.c(t, y) - op.source.c(t, x));
            note(c_equal, dc, dc > 1e-14 * std::max(1.0, std::abs(op.source.c(t, x))), y);
            const double asym = (at - at.transpose()).cwiseAbs().maxCoeff();
            note(sym, asym, asym > 1e-12 * std::max(1.0, at.cwiseAbs().maxCoeff()), y);
            Eigen::SelfAdjointEigenSolver<Matrix> e1(a, Eigen::EigenvaluesOnly), e2(at, Eigen::EigenvaluesOnly);
            const Vector l1 = e1.eigenvalues();
            const Vector l2 = e2.eigenvalues();
            double rel = 0.0;
            for (int i = 0; i < d; ++i) {
                rel = std::max(rel, std::abs(l1[i] - l2[i]) / std::max(std::abs(l1[i]), 1e-300));
            }
            note(eig, rel, !(rel <= o.eigen_rel_tol), y);
            const double ztol = 1e-12 * std::max(1.0, std::max(l1.cwiseAbs().maxCoeff(), l2.cwiseAbs().maxCoeff()));
            const bool same = detail::inertia(l1, ztol) == detail::inertia(l2, ztol);
            note(inert, same ? 0.0 : 1.0, !same, y);
        }
    }
    rep.checks = {a_zero, bperp, bpar, bd_equal, c_equal, sym, eig, inert};
    for (const auto& c : rep.checks) rep.passed = rep.passed && c.pass;
    return rep;
}

/// Largest entrywise difference between the analytic and chain-rule coefficients on the image of a half-ball.
inline double compare_transform_methods(const CoefficientField& coeffs, const Diffeomorphism& phi, int samples,
                                        double radius, double t = 0.0) {
    const auto an = transform_coefficients(coeffs, phi, TransformMethod::Analytic);
    const auto nu = transform_coefficients(coeffs, phi, TransformMethod::ChainRuleNumeric);
    double worst = 0.0;
    for (int k = 0; k < samples; ++k) {
        for (int j = 0; j <= samples; ++j) {
            const double r = radius * (k + 0.5) / samples * 0.95;
            const double th = M_PI * j / samples;
            Vector x(2);
            x << r * std::cos(th), r * std::sin(th);
            const Vector y = phi.forward(t, x);
            worst = std::max(worst, (an.coeffs.a(t, y) - nu.coeffs.a(t, y)).cwiseAbs().maxCoeff());
            worst = std::max(worst, (an.coeffs.b(t, y) - nu.coeffs.b(t, y)).cwiseAbs().maxCoeff());
        }
    }
    return worst;
}

}  // namespace degenmax
