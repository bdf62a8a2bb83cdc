#include "degenmax/degenmax.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace degenmax;
using Json = nlohmann::ordered_json;

enum class LogLevel { Quiet, Info, Debug };

struct Options {
    std::string problem;
    std::string out = ".";
    std::uint64_t seed = acceptance::SuiteOptions{}.seed;
    std::string suite = "all";
    std::string drift = "upwind";
    std::string log_level = "info";
    std::string fn = "M";
    double a = 0.0;
    double b = 1.0;
    double x = 0.0;
    std::string point;
    std::string map = "kill-tangential";
    bool verify = false;
};

LogLevel log_level(const Options& o) {
    if (o.log_level == "quiet") return LogLevel::Quiet;
    if (o.log_level == "debug") return LogLevel::Debug;
    return LogLevel::Info;
}

void note(const Options& o, const std::string& msg) {
    if (log_level(o) != LogLevel::Quiet) std::cerr << msg << '\n';
}

DriftScheme drift_scheme(const std::string& s) {
    if (s == "upwind") return DriftScheme::Upwind;
    if (s == "central") return DriftScheme::Central;
    if (s == "downwind") return DriftScheme::Downwind;
    fail(ErrorKind::Config, "unknown drift scheme '" + s + "'");
}

std::string output_path(const Options& o, const std::string& name) {
    std::filesystem::create_directories(o.out);
    return (std::filesystem::path(o.out) / name).string();
}

void write_result(const Options& o, const Json& j) { write_text(output_path(o, "result.json"), to_json_text(j)); }

Problem require_problem(const Options& o) {
    if (o.problem.empty()) fail(ErrorKind::Config, "--problem is required");
    return load_problem(o.problem);
}

Json warnings_json(const std::vector<std::string>& w) {
    Json arr = Json::array();
    for (const auto& s : w) arr.push_back(s);
    return arr;
}

std::vector<double> node_row(const Vector& x) { return std::vector<double>(x.data(), x.data() + x.size()); }

std::vector<std::string> coordinate_header(int dim) {
    return dim == 1 ? std::vector<std::string>{"x"} : std::vector<std::string>{"x", "y"};
}

const char* class_name(NodeClass c) {
    switch (c) {
        case NodeClass::Interior: return "interior";
        case NodeClass::Degenerate: return "degenerate";
        case NodeClass::NonDegenerate: return "nondegenerate";
    }
    return "interior";
}

int run_classify(const Options& o) {
    const Problem p = require_problem(o);
    const Grid grid = p.grid();
    const BoundaryClassification cls = classify_boundary(grid, p.coeffs, p.classify_options());
    Json j;
    j["operator"] = p.coeffs.name;
    j["nodes"] = grid.size();
    j["tol_zero"] = cls.tol_zero;
    j["degenerate_count"] = cls.degenerate_nodes.size();
    j["nondegenerate_count"] = cls.nondegenerate_nodes.size();
    auto header = coordinate_header(grid.dim());
    header.push_back("class");
    header.push_back("fichera");
    CsvWriter csv(header);
    Json deg = Json::array();
    for (std::size_t n = 0; n < grid.size(); ++n) {
        if (!grid.is_boundary(n)) continue;
        auto row = node_row(grid.node(n));
        row.push_back(static_cast<double>(cls.node_class[n]));
        double fb = std::numeric_limits<double>::quiet_NaN();
        if (cls.is_degenerate(n)) {
            fb = fichera_function(p.coeffs, cls, grid, n);
            deg.push_back(Json{{"node", to_json(grid.node(n))}, {"fichera", fb}});
        }
        row.push_back(fb);
        csv.add(row);
    }
    j["degenerate"] = deg;
    if (!cls.degenerate_nodes.empty()) {
        const Rectangle box = grid.domain().bounding_box();
        const double depth = 0.25 * (box.x_hi - box.x_lo);
        const LipschitzEstimate est = estimate_boundary_lipschitz(p.coeffs, cls, grid, depth);
        j["lipschitz"] = Json{{"K", est.K}, {"non_lipschitz", est.non_lipschitz}};
    }
    Json classes = Json::object();
    for (auto c : {NodeClass::Degenerate, NodeClass::NonDegenerate}) {
        classes[class_name(c)] = static_cast<int>(c);
    }
    j["class_codes"] = classes;
    csv.save(output_path(o, "classification.csv"));
    write_result(o, j);
    note(o, std::to_string(cls.degenerate_nodes.size()) + " degenerate, " +
                std::to_string(cls.nondegenerate_nodes.size()) + " non-degenerate boundary nodes");
    return 0;
}

int run_special_eval(const Options& o) {
    const special::HypergeometricParams hp{o.a, o.b};
    double v = 0.0;
    if (o.fn == "M") v = special::kummer_M(hp, o.x);
    else if (o.fn == "U") v = special::tricomi_U(hp, o.x);
    else if (o.fn == "Mprime") v = special::kummer_M_derivative(hp, o.x);
    else if (o.fn == "Uprime") v = special::tricomi_U_derivative(hp, o.x);
    else fail(ErrorKind::Config, "unknown function '" + o.fn + "'");
    std::cout << format_double(v) << '\n';
    return 0;
}

int run_special_classify(const Options& o) {
    std::cout << special::to_string(special::classify_U_regularity(o.a, o.b)) << '\n';
    return 0;
}

std::vector<double> parse_point(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        char* end = nullptr;
        const double v = std::strtod(item.c_str(), &end);
        if (item.empty() || *end != '\0') fail(ErrorKind::Config, "malformed --point '" + s + "'");
        out.push_back(v);
    }
    return out;
}

/// Orthonormal frame at a flat boundary node: column d-1 is the inward normal.
Matrix local_frame(const Vector& normal) {
    const int d = static_cast<int>(normal.size());
    Matrix R = Matrix::Zero(d, d);
    R.col(d - 1) = normal;
    if (d == 2) R.col(0) = make_point({normal[1], -normal[0]});
    return R;
}

CoefficientField rotated(const CoefficientField& f, const Vector& origin, const Matrix& R) {
    CoefficientField g = f;
    g.a = [f, origin, R](double t, const Vector& x) -> Matrix { return R.transpose() * f.a(t, origin + R * x) * R; };
    g.b = [f, origin, R](double t, const Vector& x) -> Vector { return R.transpose() * f.b(t, origin + R * x); };
    g.c = [f, origin, R](double t, const Vector& x) { return f.c(t, origin + R * x); };
    g.da = nullptr;
    return g;
}

int run_perturb(const Options& o) {
    const Problem p = require_problem(o);
    if (!p.perturb.u) fail(ErrorKind::Config, "perturb.u is required");
    if (p.domain->is_half_graph()) fail(ErrorKind::Unsupported, "perturb needs a flat boundary; straighten the graph first");
    const Grid grid = p.grid();
    const int dim = grid.dim();
    const auto coords = parse_point(o.point);
    if (static_cast<int>(coords.size()) != dim) fail(ErrorKind::Config, "--point needs " + std::to_string(dim) + " coordinates");
    Vector x0(dim);
    for (int k = 0; k < dim; ++k) x0[k] = coords[static_cast<std::size_t>(k)];
    const BoundaryClassification cls = classify_boundary(grid, p.coeffs, p.classify_options());
    std::size_t nearest = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t n = 0; n < grid.size(); ++n) {
        const double dist = (grid.node(n) - x0).norm();
        if (dist < best) {
            best = dist;
            nearest = n;
        }
    }
    if (best > 0.5 * grid.min_spacing() || !cls.is_degenerate(nearest)) {
        fail(ErrorKind::Config, "--point " + format_point(x0) + " is not a degenerate boundary node");
    }
    const Vector normal = cls.inward_normals[nearest];
    if (std::abs(normal.cwiseAbs().maxCoeff() - 1.0) > 1e-12) {
        fail(ErrorKind::Config, "--point must lie on a flat side, not a corner");
    }
    const Matrix R = local_frame(normal);
    const CoefficientField local = rotated(p.coeffs, x0, R);
    const Expression ue = *p.perturb.u;
    const ScalarField u = numeric_field([ue, x0, R](double t, const Vector& x) { return ue(t, x0 + R * x); }, dim);

    const PerturbationMode mode = p.parabolic ? PerturbationMode::Parabolic : PerturbationMode::Elliptic;
    BoundaryMaxData data;
    const Vector origin = Vector::Zero(dim);
    data.r = u.value(0.0, origin);
    data.p = u.gradient(0.0, origin)[dim - 1];
    data.b0 = local.b(0.0, origin)[dim - 1];
    data.K = p.perturb.K > 0.0 ? p.perturb.K
                               : estimate_boundary_lipschitz(p.coeffs, cls, grid, p.perturb.rho0).K;
    data.Lambda0 = p.perturb.Lambda0;
    data.ell = p.perturb.ell;
    data.rho0 = p.perturb.rho0;
    data.tau = p.perturb.tau;

    Json j;
    j["point"] = to_json(x0);
    j["normal"] = to_json(normal);
    j["mode"] = to_string(mode);
    j["data"] = Json{{"p", data.p}, {"r", data.r}, {"b0", data.b0}, {"K", data.K}, {"Lambda0", data.Lambda0},
                     {"ell", data.ell}, {"rho0", data.rho0}, {"tau", data.tau}};
    const PerturbationSpec spec = select_constants(data, u, dim, mode);
    j["spec"] = Json{{"eta", spec.eta}, {"zeta", spec.zeta}, {"Q", spec.Q}, {"m", spec.m}, {"x_hat_d", spec.x_hat_d},
                     {"doublings", spec.doublings}, {"max_remainder", spec.max_remainder},
                     {"remainder_bound", spec.remainder_bound}};
    CylinderReport cyl_rep;
    const CutCylinder cyl = build_cylinder(spec, data, &cyl_rep);
    Json radius = Json::array();
    for (int k = 0; k <= 16; ++k) {
        const double xd = spec.x_hat_d * k / 16.0;
        radius.push_back(Json{{"x_d", xd}, {"rho", cyl.radius(xd)}});
    }
    j["cylinder"] = Json{{"x_hat_d", cyl.x_hat_d()}, {"rho0", cyl.rho0()}, {"radius", radius},
                         {"dominates_sufficient_radius", cyl_rep.dominates_sufficient_radius},
                         {"min_margin", cyl_rep.min_margin}};
    const Certificate cert = certify(spec, data, local, u, p.perturb.grid_density);
    Json failures = Json::array();
    for (const auto& f : cert.failures) failures.push_back(f);
    Json sweeps = Json::array();
    for (const auto& s : cert.sweeps) {
        sweeps.push_back(Json{{"name", s.name}, {"max", s.max_value}, {"bound", s.bound}, {"pass", s.pass},
                              {"witness", to_json(s.witness.x)}});
    }
    j["certificate"] = Json{{"passed", cert.passed}, {"hopf_derivative", cert.hopf_derivative},
                            {"interior_samples", cert.interior_samples}, {"max_Av", cert.max_Av},
                            {"max_Av_at", to_json(cert.max_Av_at.x)}, {"max_Aw", cert.max_Aw},
                            {"argmax", to_json(cert.argmax.x)}, {"argmax_t", cert.argmax.t},
                            {"max_v", cert.argmax.value}, {"argmax_interior", cert.argmax_interior},
                            {"fine_argmax", to_json(cert.fine_argmax.x)}, {"fine_agrees", cert.fine_agrees},
                            {"sweeps", sweeps}, {"failures", failures}};
    std::vector<std::string> header{"t"};
    for (const auto& h : coordinate_header(dim)) header.push_back(h);
    header.push_back("v");
    CsvWriter csv(header);
    for (const auto& s : cert.field) {
        std::vector<double> row{s.t};
        for (Eigen::Index k = 0; k < s.x.size(); ++k) row.push_back(s.x[k]);
        row.push_back(s.value);
        csv.add(row);
    }
    csv.save(output_path(o, "vfield.csv"));
    write_result(o, j);
    for (const auto& f : cert.failures) note(o, "certificate: " + f);
    return cert.passed ? 0 : 1;
}

int run_transform(const Options& o) {
    const Problem p = require_problem(o);
    if (p.domain->dim() != 2) fail(ErrorKind::Config, "transform needs a two-dimensional domain");
    const Rectangle box = p.domain->bounding_box();
    Vector base = p.transform.base_point.value_or(
        make_point({0.5 * (box.x_lo + box.x_hi), p.gamma ? (*p.gamma)(0.0, make_point({0.5 * (box.x_lo + box.x_hi), 0.0}))
                                                        : box.y_lo}));
    Json j;
    j["map"] = o.map;
    j["base_point"] = to_json(base);
    CoefficientField field = p.coeffs;
    Diffeomorphism phi = identity_map(2);
    if (p.gamma) {
        const GraphFunction g = std::get<HalfGraph>(p.domain->geometry()).gamma;
        phi = straighten_graph_boundary(g.value, g.slope, g.curvature, p.domain->diameter());
        base = phi.forward(0.0, base);
    } else if (o.map == "straighten") {
        fail(ErrorKind::Config, "straighten needs a half-graph domain");
    }
    if (o.map != "straighten" && o.map != "kill-tangential") fail(ErrorKind::Config, "unknown map '" + o.map + "'");

    const TransformedOperator flat = transform_coefficients(field, phi, TransformMethod::ChainRuleNumeric);
    const CoefficientField local = shifted(flat.coeffs, base);
    double delta = p.transform.delta;
    if (delta <= 0.0) delta = default_killing_delta(local, 0.25 * std::min(box.x_hi - box.x_lo, box.y_hi - box.y_lo));
    j["delta"] = delta;

    TransformedOperator op = flat;
    op.source = local;
    op.coeffs = local;
    op.phi = identity_map(2);
    if (o.map == "kill-tangential") op = transform_coefficients(local, build_tangential_killing_map(local, delta),
                                                                TransformMethod::ChainRuleNumeric);
    j["method"] = to_string(op.method);

    CsvWriter csv({"y1", "y2", "a11", "a12", "a22", "b1", "b2", "c"});
    const int n = std::max(2, p.transform.samples);
    for (int k = 0; k <= n; ++k) {
        for (int l = 0; l <= n; ++l) {
            const Vector y = make_point({delta * (2.0 * k / n - 1.0), delta * l / n});
            if (y.norm() > delta * (1.0 + 1e-12)) continue;
            const Matrix a = op.coeffs.a(0.0, y);
            const Vector b = op.coeffs.b(0.0, y);
            csv.add({y[0], y[1], a(0, 0), a(0, 1), a(1, 1), b[0], b[1], op.coeffs.c(0.0, y)});
        }
    }
    csv.save(output_path(o, "transform.csv"));

    int status = 0;
    if (o.verify) {
        const TransformVerification v = verify_transform(op, n, VerifyOptions{delta});
        Json checks = Json::array();
        for (const auto& c : v.checks) {
            checks.push_back(Json{{"check", c.name}, {"pass", c.pass}, {"worst", c.worst}, {"at", to_json(c.witness)}});
            if (!c.pass) note(o, "verification: " + c.name + " fails at " + format_point(c.witness));
        }
        j["verification"] = Json{{"passed", v.passed}, {"checks", checks}};
        if (!v.passed) status = 1;
    }
    write_result(o, j);
    return status;
}

struct GridSolve {
    Grid grid;
    BoundaryClassification cls;
    DataFn g;
    AssemblyOptions ao;
};

GridSolve prepare(const Problem& p, const Options& o) {
    Grid grid = p.grid();
    BoundaryClassification cls = classify_boundary(grid, p.coeffs, p.classify_options());
    DataFn g = p.boundary_data(grid, cls);
    AssemblyOptions ao;
    ao.drift = drift_scheme(o.drift);
    return {std::move(grid), std::move(cls), std::move(g), ao};
}

Json strong_json(const StrongMaxDiagnostic& d, const Grid& grid) {
    return Json{{"status", d.status}, {"max_value", d.max_value}, {"argmax", to_json(grid.node(d.argmax))},
                {"argmax_time", d.argmax_time}, {"component_size", d.component_size},
                {"constant", d.constant}, {"deviation", d.deviation}};
}

int run_solve(const Options& o) {
    const Problem p = require_problem(o);
    const GridSolve s = prepare(p, o);
    const int dim = s.grid.dim();
    Json j;
    j["operator"] = p.coeffs.name;
    j["mode"] = p.parabolic ? "parabolic" : "elliptic";
    j["nodes"] = s.grid.size();
    j["degenerate_nodes"] = s.cls.degenerate_nodes.size();
    auto header = coordinate_header(dim);
    header.push_back("u");
    CsvWriter csv(header);
    if (!p.parabolic) {
        const DiscreteOperator op = assemble_elliptic(p.coeffs, s.grid, s.cls, p.source(), s.g, s.ao);
        const SolveReport rep = solve_linear(op);
        j["method"] = rep.method;
        j["residual"] = rep.residual_norm;
        j["m_matrix"] = rep.m_matrix_ok;
        j["m_matrix_witnesses"] = rep.m_matrix_witnesses.size();
        j["strong_max"] = strong_json(discrete_strong_max_check(rep, op), s.grid);
        j["warnings"] = warnings_json(rep.warnings);
        for (std::size_t n = 0; n < s.grid.size(); ++n) {
            auto row = node_row(s.grid.node(n));
            row.push_back(rep.solution[static_cast<Eigen::Index>(n)]);
            csv.add(row);
        }
    } else {
        const auto times = backward_time_grid(p.T, p.steps);
        const ParabolicProblem prob =
            assemble_parabolic(p.coeffs, s.grid, times, s.cls, p.source(), s.g, p.terminal_data(), s.ao);
        const ParabolicSolution sol = solve_parabolic(prob);
        const DiscreteOperator spatial = assemble_elliptic(p.coeffs, s.grid, s.cls, p.source(), s.g, s.ao);
        j["steps"] = p.steps;
        j["residual"] = sol.max_residual;
        j["m_matrix"] = sol.m_matrix_ok;
        j["strong_max"] = strong_json(discrete_strong_max_check(sol, spatial), s.grid);
        j["warnings"] = warnings_json(sol.warnings);
        std::vector<std::string> th{"t"};
        for (const auto& h : header) th.push_back(h);
        CsvWriter slices(th);
        for (std::size_t k = 0; k < sol.slices.size(); ++k) {
            for (std::size_t n = 0; n < s.grid.size(); ++n) {
                std::vector<double> row{sol.times[k]};
                for (double v : node_row(s.grid.node(n))) row.push_back(v);
                row.push_back(sol.slices[k][static_cast<Eigen::Index>(n)]);
                slices.add(row);
            }
        }
        slices.save(output_path(o, "slices.csv"));
        for (std::size_t n = 0; n < s.grid.size(); ++n) {
            auto row = node_row(s.grid.node(n));
            row.push_back(sol.slices.back()[static_cast<Eigen::Index>(n)]);
            csv.add(row);
        }
    }
    csv.save(output_path(o, "solution.csv"));
    write_result(o, j);
    note(o, "wrote " + std::to_string(csv.rows()) + " rows to solution.csv");
    return 0;
}

int run_obstacle(const Options& o) {
    const Problem p = require_problem(o);
    if (!p.psi) fail(ErrorKind::Config, "obstacle needs a psi expression");
    const GridSolve s = prepare(p, o);
    const Expression psi = *p.psi;
    auto header = coordinate_header(s.grid.dim());
    header.push_back("u");
    header.push_back("psi");
    header.push_back("active");
    CsvWriter csv(header);
    Json j;
    j["operator"] = p.coeffs.name;
    j["mode"] = p.parabolic ? "parabolic" : "elliptic";
    bool ok = true;
    Vector u;
    std::vector<std::size_t> active;
    double final_time = 0.0;
    if (!p.parabolic) {
        const ObstacleProblem op = make_obstacle_problem(
            assemble_elliptic(p.coeffs, s.grid, s.cls, p.source(), s.g, s.ao),
            [psi](const Vector& x) { return psi(0.0, x); });
        const ObstacleSolution sol = solve_obstacle_elliptic(op, p.solver);
        j["iterations"] = sol.iterations;
        j["converged"] = sol.converged;
        j["final_change"] = sol.final_change;
        j["complementarity_residual"] = sol.complementarity_residual;
        j["m_matrix"] = sol.m_matrix_ok;
        j["active_nodes"] = sol.active_set.size();
        ok = sol.converged;
        u = sol.u;
        active = sol.active_set;
    } else {
        const auto times = backward_time_grid(p.T, p.steps);
        const ParabolicProblem prob =
            assemble_parabolic(p.coeffs, s.grid, times, s.cls, p.source(), s.g, p.terminal_data(), s.ao);
        const ObstacleSequence seq =
            solve_obstacle_parabolic(prob, [psi](double t, const Vector& x) { return psi(t, x); }, p.solver);
        j["steps"] = p.steps;
        j["iterations"] = seq.total_iterations;
        j["converged"] = seq.converged;
        j["complementarity_residual"] = seq.max_complementarity;
        j["m_matrix"] = seq.m_matrix_ok;
        j["active_nodes"] = seq.active_sets.back().size();
        ok = seq.converged;
        u = seq.slices.back();
        active = seq.active_sets.back();
        final_time = seq.times.back();
    }
    std::vector<bool> is_active(s.grid.size(), false);
    for (std::size_t n : active) is_active[n] = true;
    for (std::size_t n = 0; n < s.grid.size(); ++n) {
        auto row = node_row(s.grid.node(n));
        row.push_back(u[static_cast<Eigen::Index>(n)]);
        row.push_back(psi(final_time, s.grid.node(n)));
        row.push_back(is_active[n] ? 1.0 : 0.0);
        csv.add(row);
    }
    csv.save(output_path(o, "solution.csv"));
    write_result(o, j);
    note(o, std::string(ok ? "converged" : "projected SOR did not converge") + "; " + std::to_string(active.size()) +
                " active nodes");
    return ok ? 0 : 1;
}

int run_verify_suite(const Options& o) {
    acceptance::SuiteOptions so;
    so.seed = o.seed;
    so.drift = drift_scheme(o.drift);
    so.selection = acceptance::parse_selection(o.suite);
    so.threads = acceptance::thread_cap();
    const auto results = acceptance::run_suite(so);
    bool all = true;
    for (const auto& r : results) {
        std::cout << acceptance::format_line(r) << '\n';
        all = all && r.ok();
    }
    write_text(output_path(o, "result.json"), acceptance::suite_json(results, so));
    std::cout << (all ? "all criteria pass" : "some criteria fail") << '\n';
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    Options o;
    CLI::App app{"Maximum-principle toolkit for boundary-degenerate elliptic and parabolic operators"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--out", o.out, "Output directory");
    app.add_option("--log-level", o.log_level, "quiet, info or debug")->check(CLI::IsMember({"quiet", "info", "debug"}));
    auto common = [&](CLI::App* sub, bool needs_problem) {
        if (needs_problem) sub->add_option("--problem", o.problem, "Problem configuration (JSON)");
    };
    auto* classify = app.add_subcommand("classify", "Classify boundary nodes and report Fichera values");
    common(classify, true);

    auto* special = app.add_subcommand("special", "Confluent hypergeometric functions");
    special->require_subcommand(1);
    auto* eval = special->add_subcommand("eval", "Evaluate M, U or a derivative");
    eval->add_option("--fn", o.fn, "M, U, Mprime or Uprime")->required();
    eval->add_option("--a", o.a)->required();
    eval->add_option("--b", o.b)->required();
    eval->add_option("--x", o.x)->required();
    auto* sclass = special->add_subcommand("classify", "Regularity class of U(a, b, .) at 0");
    sclass->add_option("--a", o.a)->required();
    sclass->add_option("--b", o.b)->required();

    auto* perturb = app.add_subcommand("perturb", "Perturbation certificate at a degenerate boundary maximum");
    common(perturb, true);
    perturb->add_option("--point", o.point, "Comma-separated coordinates of the boundary point")->required();

    auto* transform = app.add_subcommand("transform", "Coordinate changes of the coefficients");
    common(transform, true);
    transform->add_option("--map", o.map, "straighten or kill-tangential")
        ->check(CLI::IsMember({"straighten", "kill-tangential"}));
    transform->add_flag("--verify", o.verify, "Check the transformed coefficients");

    auto* solve = app.add_subcommand("solve", "Finite-difference boundary value problem");
    common(solve, true);
    auto* obstacle = app.add_subcommand("obstacle", "Obstacle problem by projected SOR");
    common(obstacle, true);

    auto* suite = app.add_subcommand("verify-suite", "Run the acceptance battery");
    common(suite, false);
    suite->add_option("--seed", o.seed, "Seed for randomized checks");
    suite->add_option("--suite", o.suite, "all, or comma-separated criterion numbers");

    for (auto* sub : {solve, obstacle, suite}) {
        sub->add_option("--drift-scheme", o.drift)->group("");
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*classify) return run_classify(o);
        if (*special) return *eval ? run_special_eval(o) : run_special_classify(o);
        if (*perturb) return run_perturb(o);
        if (*transform) return run_transform(o);
        if (*solve) return run_solve(o);
        if (*obstacle) return run_obstacle(o);
        if (*suite) return run_verify_suite(o);
    } catch (const Error& e) {
        std::cerr << e.what() << '\n';
        return e.kind() == ErrorKind::Config || e.kind() == ErrorKind::Unsupported ? 2 : 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
