#pragma once

#include "degenmax/coefficient_transform.hpp"
#include "degenmax/coefficients.hpp"
#include "degenmax/common.hpp"
#include "degenmax/domain.hpp"
#include "degenmax/fd_solver.hpp"
#include "degenmax/io.hpp"
#include "degenmax/obstacle.hpp"
#include "degenmax/operator_core.hpp"
#include "degenmax/perturbation.hpp"
#include "degenmax/special_functions.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace degenmax::acceptance {

using Json = nlohmann::ordered_json;

struct CriterionResult {
    int id = 0;
    std::string name;
    bool pass = false;
    std::string detail;
    Json metrics = Json::object();
    double seconds = 0.0;
    double budget = 0.0;

    bool within_budget() const { return seconds <= budget; }
    bool ok() const { return pass && within_budget(); }
};

struct SuiteOptions {
    std::uint64_t seed = 20240611;
    DriftScheme drift = DriftScheme::Upwind;
    /// Empty runs every criterion.
    std::vector<int> selection;
    int threads = 1;
};

constexpr int kCriteria = 14;

inline const char* criterion_name(int id) {
    static const char* names[] = {"",
                                  "special-function ODE residual",
                                  "U asymptotic branches",
                                  "Kummer uniqueness",
                                  "Kummer convergence",
                                  "hypergeometric uniqueness without boundary data",
                                  "discrete weak maximum principle",
                                  "elliptic perturbation certificate",
                                  "parabolic perturbation certificate",
                                  "coefficient transform",
                                  "operator equivariance",
                                  "obstacle comparison and uniqueness",
                                  "Hopf check",
                                  "second-derivative diagnostic",
                                  "determinism"};
    return id >= 1 && id <= kCriteria ? names[id] : "";
}

inline double criterion_budget(int id) {
    static const double budgets[] = {0, 1, 1, 0.1, 2, 1, 30, 10, 10, 2, 2, 30, 1, 1, 600};
    return id >= 1 && id <= kCriteria ? budgets[id] : 0.0;
}

/// "all", or a comma-separated list of criterion numbers.
inline std::vector<int> parse_selection(const std::string& text) {
    if (text.empty()) fail(ErrorKind::Config, "empty suite selection");
    if (text == "all") return {};
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        const long id = std::strtol(item.c_str(), &end, 10);
        if (item.empty() || *end != '\0' || id < 1 || id > kCriteria) {
            fail(ErrorKind::Config, "unknown criterion '" + item + "' in suite selection");
        }
        out.push_back(static_cast<int>(id));
    }
    return out;
}

/// DEGENMAX_THREADS, clamped to at least 1; defaults to 1.
inline int thread_cap() {
    const char* env = std::getenv("DEGENMAX_THREADS");
    if (!env) return 1;
    const int n = std::atoi(env);
    return n >= 1 ? n : 1;
}

namespace detail {

inline std::mt19937_64 rng_for(std::uint64_t seed, int id) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(id)};
    return std::mt19937_64(seq);
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
}

struct Solved1D {
    Grid grid;
    BoundaryClassification cls;
    DiscreteOperator op;
    SolveReport report;
};

inline Solved1D solve_interval(const CoefficientField& f, double lo, double hi, int cells, const DataFn& src,
                               const DataFn& g, DriftScheme drift) {
    Grid grid = Grid::build(SpatialDomain::interval(lo, hi), {cells, 0});
    BoundaryClassification cls = classify_boundary(grid, f);
    AssemblyOptions ao;
    ao.drift = drift;
    DiscreteOperator op = assemble_elliptic(f, grid, cls, src, g, ao);
    SolveReport rep = solve_linear(op);
    return {std::move(grid), std::move(cls), std::move(op), std::move(rep)};
}

inline double max_abs(const Vector& v) { return v.cwiseAbs().maxCoeff(); }

// Criterion 1.
inline void ode_residual(CriterionResult& r) {
    const double pairs[4][2] = {{1, 1}, {1, 2}, {0.5, 1.5}, {2, 3}};
    double worst = 0.0;
    Json per = Json::array();
    for (const auto& ab : pairs) {
        const double a = ab[0], b = ab[1];
        double w = 0.0;
        for (int k = 1; k <= 20; ++k) {
            const double x = 2.0 * k / 20.0;
            const double M = special::kummer_M({a, b}, x);
            const double M1 = a / b * special::kummer_M({a + 1, b + 1}, x);
            const double M2 = a / b * (a + 1) / (b + 1) * special::kummer_M({a + 2, b + 2}, x);
            w = std::max(w, std::abs(-x * M2 - (b - x) * M1 + a * M));
        }
        per.push_back(Json{{"a", a}, {"b", b}, {"max_residual", w}});
        worst = std::max(worst, w);
    }
    r.metrics["cases"] = per;
    r.metrics["max_residual"] = worst;
    r.pass = worst < 1e-7;
    r.detail = "max residual " + format_double(worst);
}

/// Connection formula evaluated independently of the library's branch selection.
inline double connection_U(double a, double b, double x) {
    return special::gamma_fn(1 - b) * special::reciprocal_gamma(a - b + 1) * special::kummer_M({a, b}, x) +
           special::gamma_fn(b - 1) * special::reciprocal_gamma(a) * std::pow(x, 1 - b) *
               special::kummer_M({a - b + 1, 2 - b}, x);
}

// Criterion 2.
inline void asymptotics(CriterionResult& r) {
    struct Branch {
        std::string name;
        double a, b;
        double power;     ///< leading power alpha in C x^alpha
        double shift;     ///< known constant subtracted before scaling
        double leading;   ///< oracle C
        double gap;       ///< remainder order relative to the leading term
    };
    auto poch = [](double b, int n) {
        double p = 1.0;
        for (int k = 0; k < n; ++k) p *= b + k;
        return p;
    };
    std::vector<Branch> branches;
    branches.push_back({"a=-n", -2.0, 0.5, 0.0, 0.0, poch(0.5, 2), 1.0});
    branches.push_back({"a=-n (second case)", -1.0, 2.5, 0.0, 0.0, -poch(2.5, 1), 1.0});
    branches.push_back({"a=b-1-n", 0.5, 2.5, 1.0 - 2.5, 0.0, -poch(2.0 - 2.5, 1), 1.0});
    branches.push_back({"a=b-1-n (second case)", -0.7, 1.3, 1.0 - 1.3, 0.0, -poch(2.0 - 1.3, 1), 1.0});
    branches.push_back({"b>2", 0.3, 2.5, 1.0 - 2.5, 0.0,
                        special::gamma_fn(1.5) / special::gamma_fn(0.3), 1.0});
    branches.push_back({"1<b<2", 0.7, 1.5, 1.0 - 1.5,
                        special::gamma_fn(1.0 - 1.5) / special::gamma_fn(0.7 - 1.5 + 1.0),
                        special::gamma_fn(0.5) / special::gamma_fn(0.7), 1.0});
    branches.push_back({"0<b<1", 0.5, 0.5, 0.0, 0.0, special::gamma_fn(0.5) / special::gamma_fn(1.0), 0.5});
    const double ladder[3] = {1e-2, 1e-3, 1e-4};
    double worst = 0.0;
    double worst_consistency = 0.0;
    Json per = Json::array();
    for (const Branch& br : branches) {
        double est[3];
        for (int k = 0; k < 3; ++k) {
            const double x = ladder[k];
            const double u = special::tricomi_U({br.a, br.b}, x);
            const double c = connection_U(br.a, br.b, x);
            worst_consistency = std::max(worst_consistency, std::abs(u - c) / std::max(std::abs(c), 1e-300));
            est[k] = (u - br.shift) / std::pow(x, br.power);
        }
        const double q = std::pow(10.0, br.gap);
        const double extrap = (q * est[2] - est[1]) / (q - 1.0);
        const double rel = std::abs(extrap - br.leading) / std::abs(br.leading);
        worst = std::max(worst, rel);
        per.push_back(Json{{"branch", br.name}, {"a", br.a}, {"b", br.b}, {"leading", br.leading},
                           {"extrapolated", extrap}, {"relative_error", rel}});
    }
    r.metrics["branches"] = per;
    r.metrics["max_relative_error"] = worst;
    r.metrics["max_connection_mismatch"] = worst_consistency;
    r.pass = worst < 1e-3 && worst_consistency < 1e-10;
    r.detail = "leading-coefficient error " + format_double(worst) + ", connection mismatch " +
               format_double(worst_consistency);
}

// Criterion 3.
inline void kummer_uniqueness(CriterionResult& r, DriftScheme drift) {
    const auto f = builtin::kummer(1.0, 1.0);
    const auto s = solve_interval(f, 0.0, 1.0, 128, nullptr, [](double, const Vector&) { return 0.0; }, drift);
    const bool split = s.cls.is_degenerate(0) && s.cls.is_nondegenerate(s.grid.size() - 1);
    const double m = max_abs(s.report.solution);
    r.metrics["max_abs_u"] = m;
    r.metrics["degenerate_left_only"] = split;
    r.pass = split && m < 1e-10;
    r.detail = "max |u| " + format_double(m) + (split ? "" : "; boundary classification wrong");
}

// Criterion 4.
inline void kummer_convergence(CriterionResult& r, DriftScheme drift) {
    const auto f = builtin::kummer(1.0, 1.0);
    const double e = std::exp(1.0);
    auto solve_at = [&](int cells) {
        auto s = solve_interval(f, 0.0, 1.0, cells, nullptr, [e](double, const Vector&) { return e; }, drift);
        return std::make_pair(s.grid, s.report.solution);
    };
    const ConvergenceReport rep =
        convergence_study(solve_at, [](const Vector& x) { return std::exp(x[0]); }, {32, 64, 128, 256});
    Json errs = Json::array();
    for (double v : rep.errors) errs.push_back(v);
    r.metrics["errors"] = errs;
    r.metrics["rate"] = rep.rate;
    r.pass = rep.exact || rep.rate >= 0.9;
    r.detail = "observed rate " + format_double(rep.rate);
}

// Criterion 5.
inline void hypergeometric_uniqueness(CriterionResult& r, DriftScheme drift) {
    const auto f = builtin::hypergeometric(1.0, 1.0, 1.0);
    try {
        const auto s = solve_interval(f, 0.0, 1.0, 128, nullptr, nullptr, drift);
        const bool none = s.cls.nondegenerate_nodes.empty();
        const double m = max_abs(s.report.solution);
        const auto small = solve_interval(f, 0.0, 1.0, 32, nullptr, nullptr, drift);
        const Matrix dense = Matrix(small.op.matrix);
        const double det = dense.fullPivLu().determinant();
        r.metrics["no_boundary_data"] = none;
        r.metrics["max_abs_u"] = m;
        r.metrics["determinant_32"] = det;
        r.pass = none && m < 1e-10 && std::isfinite(det) && det != 0.0;
        r.detail = "max |u| " + format_double(m) + ", det " + format_double(det);
    } catch (const Error& e) {
        r.pass = false;
        r.detail = e.what();
    }
}

// Criterion 6.
inline void weak_max(CriterionResult& r, std::uint64_t seed, DriftScheme drift) {
    auto rng = rng_for(seed, 6);
    int m_matrix_failures = 0, sign_failures = 0, bound_failures = 0;
    double worst_sign = -std::numeric_limits<double>::infinity();
    double worst_excess = -std::numeric_limits<double>::infinity();
    std::string witness;
    for (int trial = 0; trial < 50; ++trial) {
        const bool two_d = trial % 2 == 1;
        const double amp = uniform(rng, 0.1, 2.0);
        const double om = uniform(rng, 0.5, 6.0);
        const double ph = uniform(rng, 0.0, 6.283185307179586);
        const double gneg = uniform(rng, 0.0, 1.0);
        const double S = uniform(rng, 0.1, 2.0);
        const DataFn f_neg = [=](double, const Vector& x) {
            return -amp * 0.5 * (1.0 + std::sin(om * x.sum() + ph));
        };
        const DataFn f_sup = [=](double, const Vector& x) { return S * std::cos(om * x.sum() + ph); };
        const DataFn g_neg = [=](double, const Vector& x) { return -gneg * (1.0 + 0.5 * std::cos(x.sum())); };

        CoefficientField f1, f2;
        Grid grid = Grid::build(SpatialDomain::interval(0.0, 1.0), {8, 0});
        if (!two_d) {
            const double bp = uniform(rng, 0.5, 3.0);
            const double ell = uniform(rng, 0.5, 2.0);
            f1 = builtin::kummer(uniform(rng, 0.0, 2.0), bp);
            f2 = builtin::kummer(1.0, bp);
            grid = Grid::build(SpatialDomain::interval(0.0, ell), {64, 0});
        } else {
            const double a11 = uniform(rng, 0.5, 2.0), a22 = uniform(rng, 0.5, 2.0);
            const double a12 = uniform(rng, -0.4, 0.4) * std::min(a11, a22);
            Matrix A(2, 2);
            A << a11, a12, a12, a22;
            const Vector b = make_point({uniform(rng, -1.0, 1.0), uniform(rng, 0.5, 2.0)});
            f1 = builtin::linear_in_distance(A, b, uniform(rng, 0.0, 1.0));
            f2 = builtin::linear_in_distance(A, b, 1.0);
            grid = Grid::build(SpatialDomain::rectangle(0.0, 1.0, 0.0, 1.0), {24, 24});
        }
        AssemblyOptions ao;
        ao.drift = drift;
        for (int part = 0; part < 2; ++part) {
            const CoefficientField& cf = part == 0 ? f1 : f2;
            const BoundaryClassification cls = classify_boundary(grid, cf);
            const DiscreteOperator op = assemble_elliptic(cf, grid, cls, part == 0 ? f_neg : f_sup, g_neg, ao);
            const SolveReport rep = solve_linear(op);
            if (!rep.m_matrix_ok) ++m_matrix_failures;
            if (part == 0) {
                const double mx = rep.solution.maxCoeff();
                worst_sign = std::max(worst_sign, mx);
                if (mx > 1e-9) {
                    ++sign_failures;
                    if (witness.empty()) witness = "trial " + std::to_string(trial) + ": max u " + format_double(mx);
                }
            } else {
                const WeakMaxResult wm = discrete_weak_max_check(rep, op, 1.0);
                const double excess = wm.max_u - wm.bound;
                worst_excess = std::max(worst_excess, excess);
                if (excess > 1e-9) {
                    ++bound_failures;
                    if (witness.empty()) {
                        witness = "trial " + std::to_string(trial) + ": max u exceeds bound by " + format_double(excess);
                    }
                }
            }
        }
    }
    r.metrics["trials"] = 50;
    r.metrics["m_matrix_failures"] = m_matrix_failures;
    r.metrics["sign_failures"] = sign_failures;
    r.metrics["bound_failures"] = bound_failures;
    r.metrics["max_u_nonpositive_data"] = worst_sign;
    r.metrics["max_excess_over_bound"] = worst_excess;
    r.pass = m_matrix_failures == 0 && sign_failures == 0 && bound_failures == 0;
    std::string d;
    if (m_matrix_failures) d += "M-matrix property violated in " + std::to_string(m_matrix_failures) + " systems; ";
    if (!witness.empty()) d += witness + "; ";
    d += "max u with f,g <= 0: " + format_double(worst_sign) + ", max excess " + format_double(worst_excess);
    r.detail = d;
}

/// u = -y - x^2/2 - t: strict maximum at the origin with D_n u = -1.
inline ScalarField certificate_field() {
    ScalarField u;
    u.value = [](double t, const Vector& x) { return -x[1] - 0.5 * x[0] * x[0] - t; };
    u.gradient = [](double, const Vector& x) { return make_point({-x[0], -1.0}); };
    u.hessian = [](double, const Vector&) {
        Matrix h = Matrix::Zero(2, 2);
        h(0, 0) = -1.0;
        return h;
    };
    u.time_derivative = [](double, const Vector&) { return -1.0; };
    return u;
}

// Criteria 7 and 8.
inline void perturbation_certificate(CriterionResult& r, PerturbationMode mode) {
    auto coeffs = builtin::linear_in_distance(Matrix::Identity(2, 2), make_point({0.0, 1.0}), 0.0);
    coeffs.parabolic = mode == PerturbationMode::Parabolic;
    BoundaryMaxData data;
    data.p = -1.0;
    data.r = 0.0;
    data.b0 = 1.0;
    data.K = 1.0;
    data.ell = 0.5;
    data.rho0 = 0.5;
    data.tau = 0.5;
    const ScalarField u = certificate_field();
    try {
        const PerturbationSpec spec = select_constants(data, u, 2, mode);
        CertifyOptions co;
        co.keep_field = false;
        const int N = mode == PerturbationMode::Parabolic ? 12 : 40;
        const Certificate cert = certify(spec, data, coeffs, u, N, co);
        r.metrics["Q"] = spec.Q;
        r.metrics["m"] = spec.m;
        r.metrics["eta"] = spec.eta;
        r.metrics["zeta"] = spec.zeta;
        r.metrics["x_hat_d"] = spec.x_hat_d;
        r.metrics["interior_samples"] = cert.interior_samples;
        r.metrics["max_Av"] = cert.max_Av;
        r.metrics["max_Av_at"] = to_json(cert.max_Av_at.x);
        r.metrics["argmax_interior"] = cert.argmax_interior;
        r.metrics["max_v"] = cert.argmax.value;
        r.metrics["fine_agrees"] = cert.fine_agrees;
        Json sweeps = Json::array();
        for (const auto& s : cert.sweeps) {
            sweeps.push_back(Json{{"name", s.name}, {"max", s.max_value}, {"bound", s.bound}, {"pass", s.pass}});
        }
        r.metrics["sweeps"] = sweeps;
        const bool enough = cert.interior_samples >= 1000;
        r.pass = cert.passed && enough;
        std::string d;
        for (const auto& f : cert.failures) d += f + "; ";
        if (!enough) d += "only " + std::to_string(cert.interior_samples) + " samples; ";
        r.detail = d.empty() ? "certificate holds" : d.substr(0, d.size() - 2);
    } catch (const Error& e) {
        r.pass = false;
        r.detail = e.what();
    }
}

inline CoefficientField tangential_drift_field(bool cross_term) {
    CoefficientField f;
    f.dim = 2;
    f.name = "tangential-drift";
    f.a = [cross_term](double, const Vector& x) {
        Matrix a(2, 2);
        if (cross_term) a << 1.0, 0.3, 0.3, 1.5;
        else a << 1.0, 0.0, 0.0, 2.0;
        return Matrix(x[1] * a);
    };
    f.b = [](double, const Vector& x) {
        return make_point({0.5 + 0.3 * std::sin(2.0 * x[0]) + 0.1 * x[1], 1.0 + 0.2 * std::cos(x[0])});
    };
    f.c = [](double, const Vector& x) { return 0.5 + 0.1 * x[0] * x[0]; };
    return f;
}

// Criterion 9.
inline void transform_check(CriterionResult& r) {
    const CoefficientField f = tangential_drift_field(false);
    const double delta = 0.2;
    try {
        const Diffeomorphism phi = build_tangential_killing_map(f, delta);
        const TransformedOperator op = transform_coefficients(f, phi, TransformMethod::ChainRuleNumeric);
        const TransformVerification v = verify_transform(op, 16);
        const double methods = compare_transform_methods(f, phi, 8, delta);
        Json checks = Json::array();
        std::string d;
        for (const auto& c : v.checks) {
            checks.push_back(Json{{"check", c.name}, {"pass", c.pass}, {"worst", c.worst}, {"at", to_json(c.witness)}});
            if (!c.pass) d += c.name + " fails (worst " + format_double(c.worst) + " at " + format_point(c.witness) + "); ";
        }
        r.metrics["checks"] = checks;
        r.metrics["method_difference"] = methods;
        const bool methods_ok = methods < 1e-6;
        if (!methods_ok) d += "analytic and chain-rule methods differ by " + format_double(methods) + "; ";
        r.pass = v.passed && methods_ok;
        r.detail = d.empty() ? "all transform checks hold" : d.substr(0, d.size() - 2);
    } catch (const Error& e) {
        r.pass = false;
        r.detail = e.what();
    }
}

struct TestFunction {
    double A, k1, k2, ph, B, c1, c2;

    double value(const Vector& x) const {
        return A * std::sin(k1 * x[0] + k2 * x[1] + ph) + B * std::exp(c1 * x[0] + c2 * x[1]);
    }
    Vector gradient(const Vector& x) const {
        const double s = A * std::cos(k1 * x[0] + k2 * x[1] + ph);
        const double e = B * std::exp(c1 * x[0] + c2 * x[1]);
        return make_point({s * k1 + e * c1, s * k2 + e * c2});
    }
    Matrix hessian(const Vector& x) const {
        const double s = -A * std::sin(k1 * x[0] + k2 * x[1] + ph);
        const double e = B * std::exp(c1 * x[0] + c2 * x[1]);
        Matrix h(2, 2);
        h << s * k1 * k1 + e * c1 * c1, s * k1 * k2 + e * c1 * c2, s * k1 * k2 + e * c1 * c2, s * k2 * k2 + e * c2 * c2;
        return h;
    }
};

// Criterion 10.
inline void equivariance(CriterionResult& r, std::uint64_t seed) {
    auto rng = rng_for(seed, 10);
    const CoefficientField f = tangential_drift_field(true);
    const double delta = 0.2;
    try {
        const Diffeomorphism phi = build_tangential_killing_map(f, delta);
        const TransformedOperator op = transform_coefficients(f, phi, TransformMethod::ChainRuleNumeric);
        double worst = 0.0;
        Vector worst_at = Vector::Zero(2);
        for (int fn = 0; fn < 3; ++fn) {
            TestFunction tf{uniform(rng, 0.5, 2.0), uniform(rng, -3.0, 3.0), uniform(rng, -3.0, 3.0),
                            uniform(rng, 0.0, 6.3), uniform(rng, 0.2, 1.0), uniform(rng, -1.0, 1.0),
                            uniform(rng, -1.0, 1.0)};
            for (int k = 0; k < 100; ++k) {
                const double rad = uniform(rng, 0.05, 1.8) * delta;
                const double th = uniform(rng, 0.05, 3.09);
                const Vector x = make_point({rad * std::cos(th), rad * std::sin(th)});
                const Matrix a = f.a(0.0, x);
                const double Au = -(a.array() * tf.hessian(x).array()).sum() - f.b(0.0, x).dot(tf.gradient(x)) +
                                  f.c(0.0, x) * tf.value(x);
                const Vector y = phi.forward(0.0, x);
                auto v = [&](const Vector& q) { return tf.value(phi.inverse(0.0, q)); };
                const double v0 = v(y);
                const Matrix at = op.coeffs.a(0.0, y);
                const Vector bt = op.coeffs.b(0.0, y);
                const double ct = op.coeffs.c(0.0, y);
                auto transformed = [&](double h) {
                    Vector grad(2);
                    Matrix hess(2, 2);
                    for (int i = 0; i < 2; ++i) {
                        Vector e = Vector::Zero(2);
                        e[i] = h;
                        const double p1 = v(y + e), m1 = v(y - e), p2 = v(y + 2 * e), m2 = v(y - 2 * e);
                        grad[i] = (-p2 + 8 * p1 - 8 * m1 + m2) / (12 * h);
                        hess(i, i) = (-p2 + 16 * p1 - 30 * v0 + 16 * m1 - m2) / (12 * h * h);
                    }
                    auto cross = [&](double s) {
                        const Vector e = make_point({s, s});
                        const Vector o = make_point({s, -s});
                        return (v(y + e) - v(y + o) - v(y - o) + v(y - e)) / (4 * s * s);
                    };
                    hess(0, 1) = hess(1, 0) = (4 * cross(h) - cross(2 * h)) / 3.0;
                    return -(at.array() * hess.array()).sum() - bt.dot(grad) + ct * v0;
                };
                const double Av = (16.0 * transformed(5e-4) - transformed(1e-3)) / 15.0;
                const double diff = std::abs(Av - Au);
                if (diff > worst) {
                    worst = diff;
                    worst_at = x;
                }
            }
        }
        r.metrics["max_difference"] = worst;
        r.metrics["worst_point"] = to_json(worst_at);
        r.pass = worst < 1e-6;
        r.detail = "max |A~v(Phi x) - Au(x)| " + format_double(worst) + " at " + format_point(worst_at);
    } catch (const Error& e) {
        r.pass = false;
        r.detail = e.what();
    }
}

// Criterion 11.
inline void obstacle_comparison(CriterionResult& r, std::uint64_t seed, DriftScheme drift) {
    auto rng = rng_for(seed, 11);
    const auto f = builtin::linear_in_distance(Matrix::Identity(2, 2), make_point({0.3, 1.0}), 0.5);
    const Grid grid = Grid::build(SpatialDomain::rectangle(0.0, 1.0, 0.0, 1.0), {20, 20});
    const BoundaryClassification cls = classify_boundary(grid, f);
    AssemblyOptions ao;
    ao.drift = drift;
    PsorOptions po;
    po.tol = 1e-8;
    double worst_violation = 0.0, worst_uniqueness = 0.0, worst_complementarity = 0.0;
    int failures = 0;
    bool all_converged = true;
    for (int trial = 0; trial < 20; ++trial) {
        const double lift = uniform(rng, 0.0, 0.3);
        const double src = uniform(rng, -2.0, 0.0);
        const double peak = uniform(rng, 0.1, 0.4);
        const DataFn g = [lift](double, const Vector& x) { return lift * (1.0 + std::sin(3.0 * x[0] + x[1])) * 0.5; };
        const DataFn fs = [src](double, const Vector&) { return src; };
        const auto psi = [peak](const Vector& x) {
            return peak - 2.0 * ((x[0] - 0.5) * (x[0] - 0.5) + (x[1] - 0.5) * (x[1] - 0.5));
        };
        ObstacleProblem p1 = make_obstacle_problem(assemble_elliptic(f, grid, cls, fs, g, ao), psi);
        ObstacleProblem p2 = p1;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            if (p2.op.row_kind[i] == RowKind::Dirichlet) p2.op.rhs[static_cast<Eigen::Index>(i)] += uniform(rng, 0.0, 0.2);
        }
        const ObstacleSolution s1 = solve_obstacle_elliptic(p1, po);
        const ObstacleSolution s2 = solve_obstacle_elliptic(p2, po);
        PsorOptions from_above = po;
        from_above.initial = Vector::Constant(p1.psi.size(), p1.op.rhs.maxCoeff() + 1.0);
        const ObstacleSolution s3 = solve_obstacle_elliptic(p1, from_above);
        all_converged = all_converged && s1.converged && s2.converged && s3.converged;
        const ComparisonReport order = comparison_check(s1, s2, 1e-8);
        const ComparisonReport same = comparison_check(s1, s3, 2e-8, true);
        worst_violation = std::max(worst_violation, order.max_violation);
        worst_uniqueness = std::max(worst_uniqueness, same.max_difference);
        worst_complementarity = std::max({worst_complementarity, s1.complementarity_residual,
                                          s2.complementarity_residual, s3.complementarity_residual});
        if (!order.ok || !same.ok) ++failures;
    }
    r.metrics["trials"] = 20;
    r.metrics["max_order_violation"] = worst_violation;
    r.metrics["max_uniqueness_difference"] = worst_uniqueness;
    r.metrics["max_complementarity"] = worst_complementarity;
    r.metrics["converged"] = all_converged;
    r.pass = failures == 0 && all_converged;
    r.detail = "order violation " + format_double(worst_violation) + ", re-solve difference " +
               format_double(worst_uniqueness) + (all_converged ? "" : ", PSOR did not converge");
}

// Criterion 12.
inline void hopf(CriterionResult& r, std::uint64_t seed) {
    auto rng = rng_for(seed, 12);
    const double R = 0.25;
    const auto coeffs = builtin::constant(Matrix::Identity(2, 2), make_point({0.0, 1.0}), 0.0);
    double worst = -std::numeric_limits<double>::infinity();
    bool sub_ok = true, strict_ok = true;
    for (int k = 0; k < 10; ++k) {
        const double s = uniform(rng, 0.5, 2.0);
        const double beta = uniform(rng, 0.0, 0.5) * s;
        ScalarField u;
        u.value = [=](double, const Vector& x) { return -s * x[1] + s * x[1] * x[1] + beta * x[0] * x[0]; };
        u.gradient = [=](double, const Vector& x) { return make_point({2 * beta * x[0], -s + 2 * s * x[1]}); };
        u.hessian = [=](double, const Vector&) {
            Matrix h = Matrix::Zero(2, 2);
            h(0, 0) = 2 * beta;
            h(1, 1) = 2 * s;
            return h;
        };
        for (int j = 0; j < 64; ++j) {
            const double rad = R * (j % 8 + 1) / 8.0;
            const double th = 6.283185307179586 * (j / 8) / 8.0;
            const Vector x = make_point({rad * std::cos(th), R + rad * std::sin(th)});
            if (!(apply_operator(coeffs, u, x) < 0.0)) sub_ok = false;
            if (x.norm() > 1e-12 && !(u.value(0.0, x) < 0.0)) strict_ok = false;
        }
        const HopfResult h = hopf_check(u, Vector::Zero(2), make_point({0.0, 1.0}), 1e-3);
        worst = std::max(worst, h.normal_derivative);
    }
    ScalarField c;
    c.value = [](double, const Vector&) { return 1.0; };
    c.gradient = [](double, const Vector&) { return Vector::Zero(2); };
    c.hessian = [](double, const Vector&) { return Matrix::Zero(2, 2); };
    const HopfResult flat = hopf_check(c, Vector::Zero(2), make_point({0.0, 1.0}), 1e-3);
    r.metrics["max_normal_derivative"] = worst;
    r.metrics["constant_field_fails"] = !flat.pass;
    r.metrics["fields_subharmonic"] = sub_ok;
    r.metrics["strict_maximum"] = strict_ok;
    r.pass = worst < -1e-4 && !flat.pass && sub_ok && strict_ok;
    r.detail = "max D_n u " + format_double(worst) + (flat.pass ? "; constant field wrongly passes" : "");
}

// Criterion 13.
inline void second_derivative(CriterionResult& r) {
    const Grid grid = Grid::build(SpatialDomain::interval(0.0, 1.0), {64, 0});
    const BoundaryClassification cls = classify_boundary(grid, builtin::kummer(1.0, 2.0));
    SecondDerivativeOptions o;
    o.s0 = 0.25;
    o.levels = 12;
    o.divergence_asserted = true;
    const auto theta = [](double s) { return s; };
    const auto smooth = check_second_derivative_vanishing(
        [](const Vector& x) { return special::kummer_M({1.0, 2.0}, x[0]); }, cls, grid, theta, o);
    const auto singular = check_second_derivative_vanishing(
        [](const Vector& x) { return special::tricomi_U({0.5, 0.5}, x[0]); }, cls, grid, theta, o);
    auto ladder = [](const SecondDerivativeReport& rep) {
        Json arr = Json::array();
        for (double v : rep.pairs.front().values) arr.push_back(v);
        return arr;
    };
    r.metrics["M_ladder"] = ladder(smooth);
    r.metrics["U_ladder"] = ladder(singular);
    r.pass = smooth.all_decay && !singular.all_decay;
    r.detail = std::string("M(1,2,.) ") + (smooth.all_decay ? "decays" : "does not decay") + ", U(0.5,0.5,.) " +
               (singular.all_decay ? "decays" : "does not decay");
}

}  // namespace detail

inline CriterionResult run_criterion(int id, const SuiteOptions& o);

/// Serialized suite report; no timings, so equal seeds give equal bytes.
inline std::string suite_json(const std::vector<CriterionResult>& results, const SuiteOptions& o) {
    Json j;
    j["seed"] = o.seed;
    j["drift_scheme"] = o.drift == DriftScheme::Upwind ? "upwind" : (o.drift == DriftScheme::Central ? "central" : "downwind");
    Json arr = Json::array();
    bool all = true;
    for (const auto& r : results) {
        arr.push_back(Json{{"id", r.id}, {"name", r.name}, {"pass", r.pass}, {"detail", r.detail}, {"metrics", r.metrics}});
        all = all && r.pass;
    }
    j["criteria"] = arr;
    j["all_pass"] = all;
    return to_json_text(j);
}

/// Runs the selected criteria, in parallel up to o.threads; results keep criterion order.
inline std::vector<CriterionResult> run_suite(const SuiteOptions& o) {
    std::vector<int> ids = o.selection;
    if (ids.empty()) for (int k = 1; k <= kCriteria; ++k) ids.push_back(k);
    std::vector<CriterionResult> out(ids.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (std::size_t i = next++; i < ids.size(); i = next++) out[i] = run_criterion(ids[i], o);
    };
    const int n = std::max(1, std::min<int>(o.threads, static_cast<int>(ids.size())));
    std::vector<std::thread> pool;
    for (int k = 1; k < n; ++k) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return out;
}

inline CriterionResult run_criterion(int id, const SuiteOptions& o) {
    CriterionResult r;
    r.id = id;
    r.name = criterion_name(id);
    r.budget = criterion_budget(id);
    const auto start = std::chrono::steady_clock::now();
    try {
        switch (id) {
            case 1: detail::ode_residual(r); break;
            case 2: detail::asymptotics(r); break;
            case 3: detail::kummer_uniqueness(r, o.drift); break;
            case 4: detail::kummer_convergence(r, o.drift); break;
            case 5: detail::hypergeometric_uniqueness(r, o.drift); break;
            case 6: detail::weak_max(r, o.seed, o.drift); break;
            case 7: detail::perturbation_certificate(r, PerturbationMode::Elliptic); break;
            case 8: detail::perturbation_certificate(r, PerturbationMode::Parabolic); break;
            case 9: detail::transform_check(r); break;
            case 10: detail::equivariance(r, o.seed); break;
            case 11: detail::obstacle_comparison(r, o.seed, o.drift); break;
            case 12: detail::hopf(r, o.seed); break;
            case 13: detail::second_derivative(r); break;
            case 14: {
                SuiteOptions inner = o;
                inner.selection.clear();
                for (int k = 1; k < kCriteria; ++k) inner.selection.push_back(k);
                const std::string first = suite_json(run_suite(inner), inner);
                const std::string second = suite_json(run_suite(inner), inner);
                r.pass = first == second;
                r.metrics["bytes"] = first.size();
                r.detail = r.pass ? "two runs produced identical reports" : "reports differ between runs";
                break;
            }
            default: fail(ErrorKind::Config, "unknown criterion " + std::to_string(id));
        }
    } catch (const Error& e) {
        r.pass = false;
        r.detail = e.what();
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

/// One line per criterion: PASS/FAIL, number, name, detail and timing against its budget.
inline std::string format_line(const CriterionResult& r) {
    char head[160];
    std::snprintf(head, sizeof head, "%s  %2d  %-48s %8.3fs / %gs  ", r.ok() ? "PASS" : "FAIL", r.id, r.name.c_str(),
                  r.seconds, r.budget);
    std::string line = head;
    if (r.pass && !r.within_budget()) line += "over runtime budget; ";
    return line + r.detail;
}

}  // namespace degenmax::acceptance
