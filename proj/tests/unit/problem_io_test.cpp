#include "degenmax/acceptance.hpp"
#include "degenmax/expression.hpp"
#include "degenmax/io.hpp"
#include "degenmax/problem.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace {

using namespace degenmax;

double eval(const std::string& s, double x = 0.0, double y = 0.0, double t = 0.0) {
    return Expression::parse(s)(t, make_point({x, y}));
}

ErrorKind kind_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.kind();
    }
    return ErrorKind::Construction;
}

TEST(Expression, PrecedenceAndAssociativity) {
    EXPECT_DOUBLE_EQ(eval("1 + 2 * 3"), 7.0);
    EXPECT_DOUBLE_EQ(eval("-2^2"), -4.0);
    EXPECT_DOUBLE_EQ(eval("2^3^2"), 512.0);
    EXPECT_DOUBLE_EQ(eval("2^-1"), 0.5);
    EXPECT_DOUBLE_EQ(eval("(1 + 2) * 3"), 9.0);
    EXPECT_DOUBLE_EQ(eval("8 / 4 / 2"), 1.0);
}

TEST(Expression, VariablesAndFunctions) {
    EXPECT_DOUBLE_EQ(eval("x*y + t", 2.0, 3.0, 1.0), 7.0);
    EXPECT_DOUBLE_EQ(eval("max(exp(x) - 1, 0)", -1.0), 0.0);
    EXPECT_DOUBLE_EQ(eval("min(x, y)", 2.0, -1.0), -1.0);
    EXPECT_NEAR(eval("sin(pi/2) + cos(0) + sqrt(4) + abs(-1)"), 5.0, 1e-15);
    EXPECT_DOUBLE_EQ(eval("exp(1)"), std::exp(1.0));
}

TEST(Expression, ErrorsCarryColumn) {
    try {
        Expression::parse("x + foo(1)");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Config);
        EXPECT_NE(std::string(e.what()).find("column 5"), std::string::npos) << e.what();
    }
    EXPECT_EQ(kind_of([] { Expression::parse("2 *"); }), ErrorKind::Config);
    EXPECT_EQ(kind_of([] { Expression::parse("(1"); }), ErrorKind::Config);
    EXPECT_EQ(kind_of([] { Expression::parse("1 2"); }), ErrorKind::Config);
}

const char* kKummer = R"j({
  "domain": {"type": "interval", "x_lo": 0.0, "x_hi": 1.0},
  "grid": {"cells": [16]},
  "operator": {"builtin": "kummer", "params": {"a": 1.0, "b": 1.0}},
  "bc": {"dirichlet": [{"region": "right", "value": "exp(1)"}]}
})j";

TEST(Problem, ParsesKummerConfig) {
    const Problem p = parse_problem(kKummer);
    EXPECT_EQ(p.domain->dim(), 1);
    EXPECT_EQ(p.cells[0], 16);
    EXPECT_FALSE(p.parabolic);
    const Grid g = p.grid();
    const auto cls = classify_boundary(g, p.coeffs);
    const DataFn bc = p.boundary_data(g, cls);
    EXPECT_DOUBLE_EQ(bc(0.0, g.node(16)), std::exp(1.0));
    EXPECT_TRUE(std::isnan(bc(0.0, g.node(0))));
}

TEST(Problem, SyntaxErrorReportsLocation) {
    try {
        parse_problem("{\n  \"domain\": ,\n}");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Config);
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
    }
}

TEST(Problem, SchemaErrors) {
    EXPECT_EQ(kind_of([] { parse_problem(R"j({"grid": {"cells": [4]}})j"); }), ErrorKind::Config);
    EXPECT_EQ(kind_of([] {
                  parse_problem(R"j({"domain": {"type": "torus"}, "operator": {"builtin": "kummer"}})j");
              }),
              ErrorKind::Config);
    EXPECT_EQ(kind_of([] {
                  parse_problem(R"j({"domain": {"type": "interval"}, "operator": {"builtin": "nope"}})j");
              }),
              ErrorKind::Config);
    EXPECT_EQ(kind_of([] { load_problem("/nonexistent/problem.json"); }), ErrorKind::Config);
}

TEST(Problem, DataOnDegenerateSideIsRejected) {
    const Problem p = parse_problem(R"j({
      "domain": {"type": "interval"},
      "operator": {"builtin": "kummer"},
      "bc": {"dirichlet": [{"region": "left", "value": 0}, {"region": "right", "value": 1}]}})j");
    const Grid g = p.grid();
    EXPECT_EQ(kind_of([&] { p.boundary_data(g, classify_boundary(g, p.coeffs)); }), ErrorKind::Config);
}

TEST(Problem, UncoveredNonDegenerateNodeIsRejected) {
    const Problem p = parse_problem(R"j({"domain": {"type": "interval"}, "operator": {"builtin": "kummer"}})j");
    const Grid g = p.grid();
    EXPECT_EQ(kind_of([&] { p.boundary_data(g, classify_boundary(g, p.coeffs)); }), ErrorKind::Config);
}

TEST(NumericField, DerivativesOfPolynomial) {
    const ScalarField u = numeric_field([](double t, const Vector& x) { return x[0] * x[0] * x[1] + 3.0 * t; }, 2);
    const Vector x = make_point({0.5, 2.0});
    EXPECT_NEAR(u.gradient(0.0, x)[0], 2.0, 1e-8);
    EXPECT_NEAR(u.gradient(0.0, x)[1], 0.25, 1e-8);
    EXPECT_NEAR(u.hessian(0.0, x)(0, 0), 4.0, 1e-5);
    EXPECT_NEAR(u.hessian(0.0, x)(0, 1), 1.0, 1e-5);
    EXPECT_NEAR(u.time_derivative(0.0, x), 3.0, 1e-8);
}

TEST(Io, JsonDoublesRoundTripAndNonFiniteIsNull) {
    nlohmann::ordered_json j;
    j["third"] = 1.0 / 3.0;
    j["nan"] = std::nan("");
    j["n"] = 3;
    const std::string text = to_json_text(j);
    EXPECT_NE(text.find("0.33333333333333331"), std::string::npos) << text;
    EXPECT_NE(text.find("\"nan\": null"), std::string::npos) << text;
    EXPECT_EQ(nlohmann::json::parse(text)["third"].get<double>(), 1.0 / 3.0);
    EXPECT_EQ(text.back(), '\n');
}

TEST(Io, CsvLayout) {
    CsvWriter csv({"x", "u"});
    csv.add({0.5, 0.1});
    EXPECT_EQ(csv.text(), "x,u\n0.5,0.10000000000000001\n");
    EXPECT_EQ(csv.rows(), 1u);
    EXPECT_THROW(csv.add({1.0}), Error);
}

TEST(Suite, SelectionParsing) {
    EXPECT_TRUE(acceptance::parse_selection("all").empty());
    EXPECT_EQ(acceptance::parse_selection("1,3,14"), (std::vector<int>{1, 3, 14}));
    EXPECT_EQ(kind_of([] { acceptance::parse_selection(""); }), ErrorKind::Config);
    EXPECT_EQ(kind_of([] { acceptance::parse_selection("0"); }), ErrorKind::Config);
    EXPECT_EQ(kind_of([] { acceptance::parse_selection("2,x"); }), ErrorKind::Config);
}

TEST(Suite, ReportIsDeterministicForFixedSeed) {
    acceptance::SuiteOptions o;
    o.selection = {1, 3, 6};
    o.seed = 5;
    EXPECT_EQ(acceptance::suite_json(acceptance::run_suite(o), o), acceptance::suite_json(acceptance::run_suite(o), o));
}

}  // namespace
