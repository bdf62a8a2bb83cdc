#pragma once

#include "degenmax/coefficients.hpp"
#include "degenmax/common.hpp"
#include "degenmax/operator_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace degenmax {

enum class PerturbationMode { Elliptic, Parabolic };

inline const char* to_string(PerturbationMode m) {
    return m == PerturbationMode::Elliptic ? "elliptic" : "parabolic";
}

/// Local data at a degenerate boundary maximum, in the straightened frame with the point at the origin.
struct BoundaryMaxData {
    double p = -1.0;  ///< u_{x_d}(0) < 0
    double r = 0.0;   ///< u(0)
    double b0 = 1.0;  ///< b^d(0) > 0
    double K = 1.0;
    double Lambda0 = 0.0;
    double ell = 1.0;
    double rho0 = 0.5;
    double tau = 0.0;

    void validate(PerturbationMode mode) const {
        if (!(p < 0.0)) fail(ErrorKind::Precondition, "p must be negative");
        if (!(b0 > 0.0)) fail(ErrorKind::Precondition, "b0 must be positive");
        if (!(K > 0.0)) fail(ErrorKind::Precondition, "K must be positive");
        if (!(Lambda0 >= 0.0)) fail(ErrorKind::Precondition, "Lambda0 must be non-negative");
        if (!(ell > 0.0) || !(rho0 > 0.0)) fail(ErrorKind::Precondition, "ell and rho0 must be positive");
        if (Lambda0 * ell > b0 / 4.0 * (1.0 + 1e-12)) fail(ErrorKind::Precondition, "Lambda0 * ell exceeds b0 / 4");
        if (rho0 > 1.0 + 2.0 * b0 / K) fail(ErrorKind::Precondition, "rho0 exceeds 1 + 2 b0 / K");
        if (mode == PerturbationMode::Parabolic && !(tau > 0.0)) fail(ErrorKind::Precondition, "tau must be positive");
    }
};

struct PerturbationSpec {
    double eta = 0.0;
    double zeta = 0.0;
    double Q = 0.0;
    double m = 0.0;
    double x_hat_d = 0.0;
    PerturbationMode mode = PerturbationMode::Elliptic;
    int doublings = 0;
    double max_remainder = 0.0;
    double remainder_bound = 0.0;
};

inline double perturbation_m(double b0, double K, PerturbationMode mode) {
    const double scale = mode == PerturbationMode::Elliptic ? 8.0 : 16.0;
    return scale / b0 * (K + 2.0 * b0);
}

inline double x_hat_d(double eta, double p, double m, double Q) { return (eta - p) / (m * Q); }

struct HopfResult {
    double normal_derivative = 0.0;
    bool pass = false;
};

/// One-sided second-order estimate of D_n u at x0; passes when below -tol_hopf.
inline HopfResult hopf_check(const ScalarField& u, const Vector& x0, const Vector& normal, double depth,
                             double tol_hopf = 1e-4, double t = 0.0) {
    if (!(depth > 0.0)) fail(ErrorKind::Precondition, "depth must be positive");
    const Vector n = normal / normal.norm();
    HopfResult r;
    r.normal_derivative =
        (-3.0 * u.value(t, x0) + 4.0 * u.value(t, x0 + depth * n) - u.value(t, x0 + 2.0 * depth * n)) / (2.0 * depth);
    r.pass = r.normal_derivative < -tol_hopf;
    return r;
}

struct SelectOptions {
    int box_samples = 16;
    int ladder_levels = 10;
    int max_doublings = 60;
};

namespace detail {

inline Vector local_point(int dim, double tangential, double normal) {
    Vector x = Vector::Zero(dim);
    if (dim == 2) x[0] = tangential;
    x[dim - 1] = normal;
    return x;
}

/// Sup of (u - r - p x_d) / (|x| + t) over a box [-rho0, rho0] x [0, x_hat] with a dyadic ladder toward 0.
inline double sampled_remainder(const ScalarField& u, const BoundaryMaxData& data, int dim, double x_hat,
                                const std::vector<double>& times, const SelectOptions& o) {
    std::vector<double> normals{0.0};
    for (int k = 0; k <= o.ladder_levels; ++k) normals.push_back(x_hat * std::ldexp(1.0, -k));
    for (int k = 1; k < o.box_samples; ++k) normals.push_back(x_hat * k / o.box_samples);
    std::vector<double> tangents{0.0};
    if (dim == 2) {
        for (int k = 0; k <= o.ladder_levels; ++k) {
            const double s = data.rho0 * std::ldexp(1.0, -k);
            tangents.push_back(s);
            tangents.push_back(-s);
        }
        for (int k = 1; k < o.box_samples; ++k) {
            tangents.push_back(data.rho0 * k / o.box_samples);
            tangents.push_back(-data.rho0 * k / o.box_samples);
        }
    }
    double sup = -std::numeric_limits<double>::infinity();
    for (double t : times) {
        for (double xd : normals) {
            for (double xt : tangents) {
                const Vector x = local_point(dim, xt, xd);
                const double denom = x.norm() + t;
                if (denom == 0.0) continue;
                sup = std::max(sup, (u.value(t, x) - data.r - data.p * xd) / denom);
            }
        }
    }
    return sup;
}

}  // namespace detail

/// Picks eta, zeta and the smallest Q of the doubling sequence meeting every inequality.
inline PerturbationSpec select_constants(const BoundaryMaxData& data, const ScalarField& u, int dim,
                                         PerturbationMode mode, const SelectOptions& o = {}) {
    data.validate(mode);
    if (dim != 1 && dim != 2) fail(ErrorKind::Precondition, "dimension must be 1 or 2");
    PerturbationSpec s;
    s.mode = mode;
    s.m = perturbation_m(data.b0, data.K, mode);
    s.eta = std::min(1.0, -data.p / (16.0 * s.m));
    const bool parabolic = mode == PerturbationMode::Parabolic;
    s.zeta = parabolic ? std::min(1.0, -data.b0 * data.p / 16.0) : 0.0;
    s.remainder_bound = parabolic ? std::min(-data.p / (8.0 * s.m), s.zeta / 2.0) : -data.p / (8.0 * s.m);

    std::vector<double> times{0.0};
    if (parabolic) {
        for (int k = 0; k <= o.ladder_levels; ++k) times.push_back(data.tau * std::ldexp(1.0, -k));
    }
    const double q0 = (s.eta - data.p) / (s.m * data.ell);
    std::string violated;
    for (int k = 0; k <= o.max_doublings; ++k) {
        const double Q = q0 * std::ldexp(1.0, k);
        const double xh = x_hat_d(s.eta, data.p, s.m, Q);
        violated.clear();
        if (xh > data.ell * (1.0 + 1e-12)) violated = "x_hat_d <= ell";
        else if (-data.p / (8.0 * s.m * Q) > data.rho0) violated = "-p/(8mQ) <= rho0";
        else if (xh > data.rho0) violated = "x_hat_d <= rho0";
        else if (parabolic && xh > std::min(s.zeta * data.tau / 4.0, data.tau / 2.0)) {
            violated = "x_hat_d <= min(zeta tau / 4, tau / 2)";
        }
        double rem = 0.0;
        if (violated.empty()) {
            rem = detail::sampled_remainder(u, data, dim, xh, times, o);
            if (!(rem < s.remainder_bound)) violated = "remainder o < bound";
        }
        if (violated.empty() && parabolic) {
            const double rem_tau = detail::sampled_remainder(u, data, dim, xh, {data.tau}, o);
            if (!(rem_tau <= s.zeta / 4.0)) violated = "remainder at t = tau <= zeta / 4";
        }
        if (violated.empty()) {
            s.Q = Q;
            s.x_hat_d = xh;
            s.doublings = k;
            s.max_remainder = rem;
            return s;
        }
    }
    fail(ErrorKind::Construction, "constant selection failed after " + std::to_string(o.max_doublings) +
                                      " doublings; violated inequality: " + violated);
}

/// w(t, x) = -zeta t + (eta - p) x_d - (Q/2)|x|^2.
inline ScalarField build_w(const PerturbationSpec& s, const BoundaryMaxData& data) {
    const double lin = s.eta - data.p;
    const double Q = s.Q;
    const double zeta = s.mode == PerturbationMode::Parabolic ? s.zeta : 0.0;
    ScalarField w;
    w.value = [=](double t, const Vector& x) { return -zeta * t + lin * x[x.size() - 1] - 0.5 * Q * x.squaredNorm(); };
    w.gradient = [=](double, const Vector& x) -> Vector {
        Vector g = -Q * x;
        g[x.size() - 1] += lin;
        return g;
    };
    w.hessian = [=](double, const Vector& x) -> Matrix { return -Q * Matrix::Identity(x.size(), x.size()); };
    w.time_derivative = [=](double, const Vector&) { return -zeta; };
    return w;
}

/// Cut cylinder {|x'| < rho(x_d), 0 < x_d < x_hat_d}.
class CutCylinder {
public:
    CutCylinder(const PerturbationSpec& s, const BoundaryMaxData& d)
        : rho0_(d.rho0), x_hat_(s.x_hat_d), tau_(d.tau), alpha_(-d.p / (8.0 * s.m)), Q_(s.Q) {}

    double x_hat_d() const { return x_hat_; }
    double rho0() const { return rho0_; }
    double tau() const { return tau_; }

    /// Side envelope with the root sign as written in the construction, floored at 0.
    double envelope(double xd) const {
        if (xd <= 0.0 || xd >= 2.0 * alpha_ / Q_) return 0.0;
        const double disc = alpha_ * alpha_ + 2.0 * xd * Q_ * (alpha_ - 0.5 * Q_ * xd);
        return std::max(0.0, (alpha_ - std::sqrt(std::max(0.0, disc))) / Q_);
    }

    /// Larger root of the side quadratic: the radius that actually forces v <= r on the side.
    double sufficient_radius(double xd) const {
        if (xd <= 0.0 || xd >= 2.0 * alpha_ / Q_) return 0.0;
        const double disc = alpha_ * alpha_ + 2.0 * xd * Q_ * (alpha_ - 0.5 * Q_ * xd);
        return (alpha_ + std::sqrt(std::max(0.0, disc))) / Q_;
    }

    double radius(double xd) const {
        const double lin = rho0_ + (x_hat_ - rho0_) * xd / x_hat_;
        return std::min(rho0_, std::max(envelope(xd), lin));
    }

private:
    double rho0_;
    double x_hat_;
    double tau_;
    double alpha_;
    double Q_;
};

struct CylinderReport {
    bool continuous = true;
    bool dominates_sufficient_radius = true;
    double min_margin = std::numeric_limits<double>::infinity();
};

inline CutCylinder build_cylinder(const PerturbationSpec& s, const BoundaryMaxData& d, CylinderReport* report = nullptr) {
    CutCylinder cyl(s, d);
    CylinderReport rep;
    const int samples = 1000;
    double prev = cyl.radius(0.0);
    for (int k = 0; k <= samples; ++k) {
        const double xd = s.x_hat_d * k / samples;
        if (cyl.envelope(xd) > d.rho0) {
            fail(ErrorKind::Construction, "side envelope exceeds rho0 at x_d = " + format_double(xd));
        }
        const double r = cyl.radius(xd);
        if (std::abs(r - prev) > 1e-2 * d.rho0) rep.continuous = false;
        prev = r;
        const double margin = r - cyl.sufficient_radius(xd);
        rep.min_margin = std::min(rep.min_margin, margin);
        if (margin < 0.0) rep.dominates_sufficient_radius = false;
    }
    if (!rep.continuous) fail(ErrorKind::Construction, "cylinder radius is not continuous on the sample");
    if (report) *report = rep;
    return cyl;
}

struct SamplePoint {
    double t = 0.0;
    Vector x;
    double value = 0.0;
};

struct SweepResult {
    std::string name;
    double max_value = -std::numeric_limits<double>::infinity();
    double bound = 0.0;
    SamplePoint witness;
    bool pass = true;
};

struct Certificate {
    PerturbationMode mode = PerturbationMode::Elliptic;
    double hopf_derivative = 0.0;
    std::size_t interior_samples = 0;
    double max_Av = -std::numeric_limits<double>::infinity();
    SamplePoint max_Av_at;
    double max_Aw = -std::numeric_limits<double>::infinity();
    SamplePoint max_Aw_at;
    SamplePoint argmax;
    bool argmax_interior = false;
    bool exceeds_r = false;
    SamplePoint fine_argmax;
    bool fine_agrees = false;
    std::vector<SweepResult> sweeps;
    std::vector<SamplePoint> field;
    std::vector<std::string> failures;
    bool passed = false;
};

struct CertifyOptions {
    int refinement = 10;
    double hopf_tol = 1e-4;
    bool keep_field = true;
};

/// Sampling certificate for v = u + w on the cut cylinder.
inline Certificate certify(const PerturbationSpec& s, const BoundaryMaxData& data, const CoefficientField& coeffs,
                           const ScalarField& u, int grid_density, const CertifyOptions& o = {}) {
    if (grid_density < 2) fail(ErrorKind::Precondition, "grid_density must be at least 2");
    const int dim = coeffs.dim;
    const bool parabolic = s.mode == PerturbationMode::Parabolic;
    const double tau = parabolic ? data.tau : 0.0;
    Certificate cert;
    cert.mode = s.mode;

    Vector origin = Vector::Zero(dim);
    Vector en = Vector::Zero(dim);
    en[dim - 1] = 1.0;
    const HopfResult hopf = hopf_check(u, origin, en, s.x_hat_d / 64.0, o.hopf_tol);
    cert.hopf_derivative = hopf.normal_derivative;
    if (!hopf.pass) {
        fail(ErrorKind::HopfViolation, "D_n u(0) = " + format_double(hopf.normal_derivative) +
                                           " is not negative; no strict boundary maximum");
    }

    const CutCylinder cyl = build_cylinder(s, data);
    const ScalarField w = build_w(s, data);
    const ScalarField v = u + w;
    CoefficientField op = coeffs;
    op.parabolic = parabolic;
    const int N = grid_density;
    const double xh = s.x_hat_d;
    const double rtol = 1e-12 * std::max(1.0, std::abs(data.r));
    auto point = [&](double tangential, double normal) { return detail::local_point(dim, tangential, normal); };

    // Open sample of V for the sign of A(u + w).
    const int nt_open = parabolic ? N : 1;
    const int nj_open = dim == 2 ? N : 1;
    for (int l = 0; l < nt_open; ++l) {
        const double t = parabolic ? tau * (l + 0.5) / N : 0.0;
        for (int k = 0; k < N; ++k) {
            const double xd = xh * (k + 0.5) / N;
            const double rad = cyl.radius(xd);
            for (int j = 0; j < nj_open; ++j) {
                const double xt = dim == 2 ? rad * (2.0 * (j + 0.5) / N - 1.0) : 0.0;
                const Vector x = point(xt, xd);
                const double av = apply_operator(op, v, x, t);
                const double aw = apply_operator(op, w, x, t);
                ++cert.interior_samples;
                if (av > cert.max_Av) {
                    cert.max_Av = av;
                    cert.max_Av_at = {t, x, av};
                }
                if (aw > cert.max_Aw) {
                    cert.max_Aw = aw;
                    cert.max_Aw_at = {t, x, aw};
                }
            }
        }
    }
    if (!(cert.max_Av < 0.0)) {
        cert.failures.push_back("A(u+w) = " + format_double(cert.max_Av) + " >= 0 at " +
                                format_point(cert.max_Av_at.x) + (parabolic ? " t = " + format_double(cert.max_Av_at.t) : ""));
    }

    // Closed sample for the location of the maximum.
    auto scan = [&](int n, bool record, SamplePoint& best, bool* interior) {
        best.value = -std::numeric_limits<double>::infinity();
        const int nt = parabolic ? n : 0;
        const int nj = dim == 2 ? n : 0;
        for (int l = 0; l <= nt; ++l) {
            const double t = parabolic ? tau * l / n : 0.0;
            for (int k = 0; k <= n; ++k) {
                const double xd = xh * k / n;
                const double rad = cyl.radius(xd);
                for (int j = 0; j <= nj; ++j) {
                    const double xt = dim == 2 ? rad * (2.0 * j / n - 1.0) : 0.0;
                    const Vector x = point(xt, xd);
                    const double val = v.value(t, x);
                    if (record) cert.field.push_back({t, x, val});
                    if (val > best.value) {
                        best = {t, x, val};
                        if (interior) {
                            const bool in_x = k > 0 && k < n && (dim == 1 || (j > 0 && j < nj));
                            const bool in_t = !parabolic || l < nt;
                            *interior = in_x && in_t;
                        }
                    }
                }
            }
        }
    };
    scan(N, o.keep_field, cert.argmax, &cert.argmax_interior);
    scan(N * o.refinement, false, cert.fine_argmax, nullptr);
    cert.exceeds_r = cert.argmax.value > data.r;
    const double dxd = std::abs(cert.argmax.x[dim - 1] - cert.fine_argmax.x[dim - 1]);
    const double dxt = dim == 2 ? std::abs(cert.argmax.x[0] - cert.fine_argmax.x[0]) : 0.0;
    const double dt = std::abs(cert.argmax.t - cert.fine_argmax.t);
    cert.fine_agrees = dxd <= xh / N * (1.0 + 1e-9) && dxt <= 2.0 * data.rho0 / N * (1.0 + 1e-9) &&
                       (!parabolic || dt <= tau / N * (1.0 + 1e-9));
    if (!cert.argmax_interior) cert.failures.push_back("argmax of v at " + format_point(cert.argmax.x) + " is on the boundary");
    if (!cert.exceeds_r) {
        cert.failures.push_back("max v = " + format_double(cert.argmax.value) + " does not exceed r = " + format_double(data.r));
    }
    if (!cert.fine_agrees) {
        cert.failures.push_back("refined argmax " + format_point(cert.fine_argmax.x) + " differs from " +
                                format_point(cert.argmax.x) + " by more than one cell");
    }

    // Boundary pieces.
    const int M = 4 * N;
    std::vector<double> sweep_times{0.0};
    if (parabolic) {
        sweep_times.clear();
        for (int l = 0; l < N; ++l) sweep_times.push_back(tau * l / N);
    }
    auto sweep = [&](const std::string& name, double bound, auto&& points) {
        SweepResult res;
        res.name = name;
        res.bound = bound;
        for (const auto& [t, x] : points) {
            const double val = v.value(t, x);
            if (val > res.max_value) {
                res.max_value = val;
                res.witness = {t, x, val};
            }
        }
        res.pass = res.max_value <= bound + rtol;
        if (!res.pass) {
            cert.failures.push_back(name + " sweep: v = " + format_double(res.max_value) + " > " + format_double(bound) +
                                    " at " + format_point(res.witness.x));
        }
        cert.sweeps.push_back(res);
    };
    std::vector<std::pair<double, Vector>> bottom, top, side, terminal;
    for (double t : sweep_times) {
        for (int k = 0; k <= M; ++k) {
            const double frac = dim == 2 ? 2.0 * k / M - 1.0 : 0.0;
            bottom.emplace_back(t, point(data.rho0 * frac, 0.0));
            top.emplace_back(t, point(cyl.radius(xh) * frac, xh));
            if (dim == 1 && k > 0) break;
        }
        if (dim == 2) {
            for (int k = 1; k < M; ++k) {
                const double xd = xh * k / M;
                side.emplace_back(t, point(cyl.radius(xd), xd));
                side.emplace_back(t, point(-cyl.radius(xd), xd));
            }
        }
    }
    sweep("bottom", data.r, bottom);
    sweep("top", data.r, top);
    if (dim == 2) sweep("side", data.r, side);
    if (parabolic) {
        for (int k = 0; k <= N; ++k) {
            const double xd = xh * k / N;
            for (int j = 0; j <= (dim == 2 ? N : 0); ++j) {
                const double xt = dim == 2 ? cyl.radius(xd) * (2.0 * j / N - 1.0) : 0.0;
                terminal.emplace_back(tau, point(xt, xd));
            }
        }
        sweep("temporal", data.r - s.zeta * tau / 4.0, terminal);
    }
    cert.passed = cert.failures.empty();
    return cert;
}

}  // namespace degenmax
