#pragma once

#include "degenmax/coefficients.hpp"
#include "degenmax/common.hpp"
#include "degenmax/domain.hpp"
#include "degenmax/expression.hpp"
#include "degenmax/fd_solver.hpp"
#include "degenmax/obstacle.hpp"
#include "degenmax/operator_core.hpp"

#include <json.hpp>

#include <array>
#include <bitset>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace degenmax {

using Json = nlohmann::ordered_json;

struct DirichletEntry {
    std::string region;
    Expression value;
};

struct PerturbConfig {
    std::optional<Expression> u;
    double ell = 0.5;
    double rho0 = 0.25;
    double tau = 0.5;
    /// 0 requests the sampled Lipschitz estimate.
    double K = 0.0;
    double Lambda0 = 0.0;
    int grid_density = 40;
};

struct TransformConfig {
    std::optional<Vector> base_point;
    /// 0 requests the default radius.
    double delta = 0.0;
    int samples = 16;
};

/// A parsed problem configuration.
struct Problem {
    std::optional<SpatialDomain> domain;
    std::optional<Expression> gamma;
    std::array<int, 2> cells{32, 32};
    CoefficientField coeffs;
    std::vector<DirichletEntry> dirichlet;
    Expression f = Expression::constant(0.0);
    bool parabolic = false;
    double T = 1.0;
    int steps = 20;
    std::optional<Expression> psi;
    PsorOptions solver;
    PerturbConfig perturb;
    TransformConfig transform;

    Grid grid() const { return Grid::build(*domain, cells); }

    ClassifyOptions classify_options() const {
        ClassifyOptions o;
        if (parabolic) o.times = {0.0, 0.5 * T, T};
        return o;
    }

    /// Side data on the non-degenerate nodes; throws a config error on misplaced or missing data.
    DataFn boundary_data(const Grid& grid, const BoundaryClassification& cls) const {
        std::vector<int> entry_of(grid.size(), -1);
        for (std::size_t e = 0; e < dirichlet.size(); ++e) {
            const std::string& region = dirichlet[e].region;
            if (region == "terminal") continue;
            const unsigned mask = region_mask(region);
            for (std::size_t n = 0; n < grid.size(); ++n) {
                if (!grid.is_boundary(n)) continue;
                if (mask != 0 && !(grid.sides(n) & mask)) continue;
                if (cls.is_degenerate(n)) {
                    const bool corner = std::bitset<32>(grid.sides(n)).count() > 1;
                    if (mask != 0 && !corner) {
                        fail(ErrorKind::Config, "boundary data for region '" + region +
                                                    "' falls on the degenerate node " + format_point(grid.node(n)));
                    }
                }
                if (entry_of[n] < 0) entry_of[n] = static_cast<int>(e);
            }
        }
        for (std::size_t n : cls.nondegenerate_nodes) {
            if (entry_of[n] < 0) {
                fail(ErrorKind::Config, "no boundary data for the non-degenerate node " + format_point(grid.node(n)));
            }
        }
        const Rectangle box = grid.domain().bounding_box();
        const auto h = grid.spacing();
        const int dim = grid.dim();
        auto grid_ptr = std::make_shared<const Grid>(grid);
        std::vector<DirichletEntry> entries = dirichlet;
        return [grid_ptr, entries, entry_of, box, h, dim](double t, const Vector& x) {
            const int i = static_cast<int>(std::lround((x[0] - box.x_lo) / h[0]));
            const int j = dim == 2 ? static_cast<int>(std::lround((x[1] - box.y_lo) / h[1])) : 0;
            const auto node = grid_ptr->at(i, j);
            if (!node || entry_of[*node] < 0) return std::numeric_limits<double>::quiet_NaN();
            return entries[static_cast<std::size_t>(entry_of[*node])].value(t, x);
        };
    }

    std::function<double(const Vector&)> terminal_data() const {
        for (const auto& e : dirichlet) {
            if (e.region == "terminal") {
                const Expression v = e.value;
                const double T_end = T;
                return [v, T_end](const Vector& x) { return v(T_end, x); };
            }
        }
        return nullptr;
    }

    DataFn source() const {
        const Expression e = f;
        return [e](double t, const Vector& x) { return e(t, x); };
    }

    static unsigned region_mask(const std::string& region) {
        if (region == "left") return kLeft;
        if (region == "right") return kRight;
        if (region == "bottom") return kBottom;
        if (region == "top") return kTop;
        if (region == "graph") return kGraph;
        if (region == "boundary") return 0;
        fail(ErrorKind::Config, "unknown boundary region '" + region + "'");
    }
};

namespace detail {

inline std::string json_location(const std::string& text, std::size_t byte) {
    std::size_t line = 1, col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

inline const Json& require_key(const Json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) fail(ErrorKind::Config, where + ": missing key '" + key + "'");
    return j.at(key);
}

inline double number(const Json& j, const std::string& where) {
    if (!j.is_number()) fail(ErrorKind::Config, where + ": expected a number");
    return j.get<double>();
}

inline double number_or(const Json& j, const char* key, double fallback, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    return number(j.at(key), where + "." + key);
}

inline int integer_or(const Json& j, const char* key, int fallback, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) return fallback;
    const Json& v = j.at(key);
    if (!v.is_number_integer()) fail(ErrorKind::Config, where + "." + key + ": expected an integer");
    return v.get<int>();
}

inline Expression expression(const Json& j, const std::string& where) {
    if (j.is_number()) return Expression::constant(j.get<double>());
    if (!j.is_string()) fail(ErrorKind::Config, where + ": expected a number or an expression string");
    try {
        return Expression::parse(j.get<std::string>());
    } catch (const Error& e) {
        fail(ErrorKind::Config, where + ": " + e.message());
    }
}

inline Vector vector_of(const Json& j, const std::string& where) {
    if (!j.is_array()) fail(ErrorKind::Config, where + ": expected an array");
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number(j[i], where);
    return v;
}

inline Matrix matrix_of(const Json& j, const std::string& where) {
    if (!j.is_array() || j.empty()) fail(ErrorKind::Config, where + ": expected a square matrix");
    const auto n = static_cast<Eigen::Index>(j.size());
    Matrix m(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
        const Vector row = vector_of(j[static_cast<std::size_t>(r)], where);
        if (row.size() != n) fail(ErrorKind::Config, where + ": expected a square matrix");
        m.row(r) = row.transpose();
    }
    return m;
}

/// gamma' and gamma'' by central differences of the expression.
inline GraphFunction graph_function(const Expression& e) {
    GraphFunction g;
    auto at = [e](double x) { return e(0.0, make_point({x, 0.0})); };
    g.value = at;
    g.slope = [at](double x) {
        const double h = 1e-5 * std::max(1.0, std::abs(x));
        return (at(x + h) - at(x - h)) / (2.0 * h);
    };
    g.curvature = [at](double x) {
        const double h = 1e-4 * std::max(1.0, std::abs(x));
        return (at(x + h) - 2.0 * at(x) + at(x - h)) / (h * h);
    };
    return g;
}

inline CoefficientField builtin_field(const Json& op, int dim) {
    const std::string where = "operator";
    const Json& name_j = require_key(op, "builtin", where);
    if (!name_j.is_string()) fail(ErrorKind::Config, "operator.builtin: expected a string");
    const std::string name = name_j.get<std::string>();
    const Json params = op.contains("params") ? op.at("params") : Json::object();
    const std::string pw = "operator.params";
    CoefficientField f;
    if (name == "kummer") {
        f = builtin::kummer(number_or(params, "a", 1.0, pw), number_or(params, "b", 1.0, pw));
    } else if (name == "hypergeometric") {
        f = builtin::hypergeometric(number_or(params, "a", 1.0, pw), number_or(params, "b", 1.0, pw),
                                    number_or(params, "c", 1.0, pw));
    } else if (name == "heston" || name == "heston-like") {
        builtin::HestonParams hp;
        hp.kappa = number_or(params, "kappa", hp.kappa, pw);
        hp.theta = number_or(params, "theta", hp.theta, pw);
        hp.sigma = number_or(params, "sigma", hp.sigma, pw);
        hp.rho = number_or(params, "rho", hp.rho, pw);
        hp.r = number_or(params, "r", hp.r, pw);
        hp.q = number_or(params, "q", hp.q, pw);
        f = builtin::heston_like(hp);
    } else if (name == "constant" || name == "linear-in-distance") {
        const Matrix a = matrix_of(require_key(params, "a", pw), pw + ".a");
        const Vector b = vector_of(require_key(params, "b", pw), pw + ".b");
        if (b.size() != a.rows()) fail(ErrorKind::Config, pw + ": a and b sizes differ");
        const double c = number_or(params, "c", 0.0, pw);
        f = name == "constant" ? builtin::constant(a, b, c)
                               : builtin::linear_in_distance(a, b, c, number_or(params, "base", 0.0, pw));
    } else {
        fail(ErrorKind::Config, "operator.builtin: unknown field '" + name + "'");
    }
    if (f.dim != dim) {
        fail(ErrorKind::Config, "operator '" + name + "' has dimension " + std::to_string(f.dim) +
                                    " but the domain has dimension " + std::to_string(dim));
    }
    return f;
}

}  // namespace detail

/// Parses a problem document; syntax errors report line and column.
inline Problem parse_problem(const std::string& text) {
    Json j;
    try {
        j = Json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        fail(ErrorKind::Config, "JSON syntax error at " + detail::json_location(text, e.byte == 0 ? 0 : e.byte - 1));
    }
    if (!j.is_object()) fail(ErrorKind::Config, "top level must be an object");
    Problem p;
    try {
        const Json& dom = detail::require_key(j, "domain", "config");
        const Json& type_j = detail::require_key(dom, "type", "domain");
        if (!type_j.is_string()) fail(ErrorKind::Config, "domain.type: expected a string");
        const std::string type = type_j.get<std::string>();
        if (type == "interval") {
            p.domain = SpatialDomain::interval(detail::number_or(dom, "x_lo", 0.0, "domain"),
                                               detail::number_or(dom, "x_hi", 1.0, "domain"));
        } else if (type == "rectangle" || type == "half-graph") {
            const double x_lo = detail::number_or(dom, "x_lo", 0.0, "domain");
            const double x_hi = detail::number_or(dom, "x_hi", 1.0, "domain");
            const double y_lo = detail::number_or(dom, "y_lo", 0.0, "domain");
            const double y_hi = detail::number_or(dom, "y_hi", 1.0, "domain");
            if (type == "rectangle") {
                p.domain = SpatialDomain::rectangle(x_lo, x_hi, y_lo, y_hi);
            } else {
                p.gamma = detail::expression(detail::require_key(dom, "gamma", "domain"), "domain.gamma");
                p.domain = SpatialDomain::half_graph(Rectangle{x_lo, x_hi, y_lo, y_hi}, detail::graph_function(*p.gamma));
            }
        } else {
            fail(ErrorKind::Config, "domain.type: unknown geometry '" + type + "'");
        }
        const int dim = p.domain->dim();

        if (j.contains("grid")) {
            const Json& cells = detail::require_key(j.at("grid"), "cells", "grid");
            if (!cells.is_array() || static_cast<int>(cells.size()) != dim) {
                fail(ErrorKind::Config, "grid.cells: expected one entry per dimension");
            }
            for (int k = 0; k < dim; ++k) {
                if (!cells[static_cast<std::size_t>(k)].is_number_integer()) {
                    fail(ErrorKind::Config, "grid.cells: expected integers");
                }
                p.cells[static_cast<std::size_t>(k)] = cells[static_cast<std::size_t>(k)].get<int>();
            }
        }

        p.coeffs = detail::builtin_field(detail::require_key(j, "operator", "config"), dim);

        const std::string mode = j.value("mode", std::string("elliptic"));
        if (mode != "elliptic" && mode != "parabolic") fail(ErrorKind::Config, "mode: expected elliptic or parabolic");
        p.parabolic = mode == "parabolic";
        p.coeffs.parabolic = p.parabolic;
        if (j.contains("time")) {
            p.T = detail::number_or(j.at("time"), "T", p.T, "time");
            p.steps = detail::integer_or(j.at("time"), "steps", p.steps, "time");
            if (!(p.T > 0.0) || p.steps < 1) fail(ErrorKind::Config, "time: T and steps must be positive");
        }

        if (j.contains("bc")) {
            const Json& bc = j.at("bc");
            if (bc.contains("dirichlet")) {
                const Json& list = bc.at("dirichlet");
                if (!list.is_array()) fail(ErrorKind::Config, "bc.dirichlet: expected a list");
                for (std::size_t k = 0; k < list.size(); ++k) {
                    const std::string where = "bc.dirichlet[" + std::to_string(k) + "]";
                    const Json& region = detail::require_key(list[k], "region", where);
                    if (!region.is_string()) fail(ErrorKind::Config, where + ".region: expected a string");
                    DirichletEntry e{region.get<std::string>(),
                                     detail::expression(detail::require_key(list[k], "value", where), where + ".value")};
                    if (e.region != "terminal") Problem::region_mask(e.region);
                    p.dirichlet.push_back(std::move(e));
                }
            }
        }
        if (j.contains("f")) p.f = detail::expression(j.at("f"), "f");
        if (j.contains("psi")) p.psi = detail::expression(j.at("psi"), "psi");

        if (j.contains("solver")) {
            const Json& s = j.at("solver");
            p.solver.omega = detail::number_or(s, "omega", p.solver.omega, "solver");
            p.solver.tol = detail::number_or(s, "tol", p.solver.tol, "solver");
            p.solver.max_iter = detail::integer_or(s, "max_iter", p.solver.max_iter, "solver");
        }
        if (j.contains("perturb")) {
            const Json& s = j.at("perturb");
            if (s.contains("u")) p.perturb.u = detail::expression(s.at("u"), "perturb.u");
            p.perturb.ell = detail::number_or(s, "ell", p.perturb.ell, "perturb");
            p.perturb.rho0 = detail::number_or(s, "rho0", p.perturb.rho0, "perturb");
            p.perturb.tau = detail::number_or(s, "tau", p.perturb.tau, "perturb");
            p.perturb.K = detail::number_or(s, "K", p.perturb.K, "perturb");
            p.perturb.Lambda0 = detail::number_or(s, "Lambda0", p.perturb.Lambda0, "perturb");
            p.perturb.grid_density = detail::integer_or(s, "grid_density", p.perturb.grid_density, "perturb");
        }
        if (j.contains("transform")) {
            const Json& s = j.at("transform");
            if (s.contains("base_point")) {
                p.transform.base_point = detail::vector_of(s.at("base_point"), "transform.base_point");
                if (p.transform.base_point->size() != dim) {
                    fail(ErrorKind::Config, "transform.base_point: wrong dimension");
                }
            }
            p.transform.delta = detail::number_or(s, "delta", 0.0, "transform");
            p.transform.samples = detail::integer_or(s, "samples", p.transform.samples, "transform");
        }
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorKind::Config, std::string("malformed config: ") + e.what());
    }
    return p;
}

inline Problem load_problem(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::Config, "cannot open problem file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_problem(ss.str());
}

/// Field from point values, derivatives by central differences.
inline ScalarField numeric_field(std::function<double(double, const Vector&)> val, int dim) {
    ScalarField u;
    u.value = val;
    u.gradient = [val, dim](double t, const Vector& x) {
        Vector g(dim);
        for (int k = 0; k < dim; ++k) {
            const double h = 1e-5 * std::max(1.0, std::abs(x[k]));
            Vector p = x, m = x;
            p[k] += h;
            m[k] -= h;
            g[k] = (val(t, p) - val(t, m)) / (2.0 * h);
        }
        return g;
    };
    u.hessian = [val, dim](double t, const Vector& x) {
        Matrix H(dim, dim);
        const double h = 1e-4;
        for (int k = 0; k < dim; ++k) {
            for (int l = 0; l < dim; ++l) {
                Vector pp = x, pm = x, mp = x, mm = x;
                pp[k] += h;
                pp[l] += h;
                pm[k] += h;
                pm[l] -= h;
                mp[k] -= h;
                mp[l] += h;
                mm[k] -= h;
                mm[l] -= h;
                H(k, l) = (val(t, pp) - val(t, pm) - val(t, mp) + val(t, mm)) / (4.0 * h * h);
            }
        }
        return Matrix(0.5 * (H + H.transpose()));
    };
    u.time_derivative = [val](double t, const Vector& x) {
        const double h = 1e-5;
        return (val(t + h, x) - val(t - h, x)) / (2.0 * h);
    };
    return u;
}

inline ScalarField expression_field(const Expression& e, int dim, const Vector& origin) {
    return numeric_field([e, origin](double t, const Vector& x) { return e(t, x + origin); }, dim);
}

}  // namespace degenmax
