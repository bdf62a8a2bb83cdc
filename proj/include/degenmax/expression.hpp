#pragma once

#include "degenmax/common.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <string>
#include <vector>

namespace degenmax {

/// Arithmetic over x, y, t with + - * / ^, parentheses and a handful of functions.
///
/// Grammar: expr := term (('+'|'-') term)*, term := unary (('*'|'/') unary)*,
/// unary := '-' unary | power, power := atom ('^' unary)?, atom := number | name | call | '(' expr ')'.
class Expression {
public:
    static Expression parse(const std::string& text) {
        Parser p{text, 0};
        Expression e;
        e.text_ = text;
        e.root_ = p.expr();
        p.skip();
        if (p.pos != text.size()) p.error("unexpected '" + std::string(1, text[p.pos]) + "'");
        return e;
    }

    static Expression constant(double v) {
        Expression e;
        e.text_ = format_double(v);
        e.root_ = std::make_shared<Node>();
        e.root_->op = Op::Number;
        e.root_->value = v;
        return e;
    }

    double operator()(double t, const Vector& x) const {
        const double xv = x.size() > 0 ? x[0] : 0.0;
        const double yv = x.size() > 1 ? x[1] : 0.0;
        return eval(*root_, xv, yv, t);
    }

    const std::string& text() const { return text_; }

private:
    enum class Op { Number, X, Y, T, Add, Sub, Mul, Div, Pow, Neg, Sin, Cos, Exp, Sqrt, Abs, Min, Max };

    struct Node {
        Op op = Op::Number;
        double value = 0.0;
        std::shared_ptr<Node> lhs, rhs;
    };
    using NodePtr = std::shared_ptr<Node>;

    static NodePtr make(Op op, NodePtr l = nullptr, NodePtr r = nullptr) {
        auto n = std::make_shared<Node>();
        n->op = op;
        n->lhs = std::move(l);
        n->rhs = std::move(r);
        return n;
    }

    struct Parser {
        const std::string& s;
        std::size_t pos;

        [[noreturn]] void error(const std::string& msg) const {
            fail(ErrorKind::Config, "expression '" + s + "' at column " + std::to_string(pos + 1) + ": " + msg);
        }

        void skip() {
            while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        }

        bool accept(char c) {
            skip();
            if (pos < s.size() && s[pos] == c) {
                ++pos;
                return true;
            }
            return false;
        }

        void expect(char c) {
            if (!accept(c)) error(std::string("expected '") + c + "'");
        }

        NodePtr expr() {
            NodePtr l = term();
            for (;;) {
                if (accept('+')) l = make(Op::Add, l, term());
                else if (accept('-')) l = make(Op::Sub, l, term());
                else return l;
            }
        }

        NodePtr term() {
            NodePtr l = unary();
            for (;;) {
                if (accept('*')) l = make(Op::Mul, l, unary());
                else if (accept('/')) l = make(Op::Div, l, unary());
                else return l;
            }
        }

        NodePtr unary() {
            if (accept('-')) return make(Op::Neg, unary());
            if (accept('+')) return unary();
            return power();
        }

        NodePtr power() {
            NodePtr base = atom();
            if (accept('^')) return make(Op::Pow, base, unary());
            return base;
        }

        NodePtr atom() {
            skip();
            if (pos >= s.size()) error("unexpected end of expression");
            const char c = s[pos];
            if (c == '(') {
                ++pos;
                NodePtr e = expr();
                expect(')');
                return e;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                const char* begin = s.c_str() + pos;
                char* end = nullptr;
                const double v = std::strtod(begin, &end);
                if (end == begin) error("malformed number");
                pos += static_cast<std::size_t>(end - begin);
                auto n = make(Op::Number);
                n->value = v;
                return n;
            }
            if (std::isalpha(static_cast<unsigned char>(c))) {
                const std::size_t start = pos;
                while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
                const std::string name = s.substr(start, pos - start);
                if (name == "x") return make(Op::X);
                if (name == "y") return make(Op::Y);
                if (name == "t") return make(Op::T);
                if (name == "pi") {
                    auto n = make(Op::Number);
                    n->value = M_PI;
                    return n;
                }
                Op op;
                int arity = 1;
                if (name == "sin") op = Op::Sin;
                else if (name == "cos") op = Op::Cos;
                else if (name == "exp") op = Op::Exp;
                else if (name == "sqrt") op = Op::Sqrt;
                else if (name == "abs") op = Op::Abs;
                else if (name == "min") op = Op::Min, arity = 2;
                else if (name == "max") op = Op::Max, arity = 2;
                else {
                    pos = start;
                    error("unknown name '" + name + "'");
                }
                expect('(');
                NodePtr a = expr();
                NodePtr b;
                if (arity == 2) {
                    expect(',');
                    b = expr();
                }
                expect(')');
                return make(op, a, b);
            }
            error("unexpected '" + std::string(1, c) + "'");
        }
    };

    static double eval(const Node& n, double x, double y, double t) {
        switch (n.op) {
            case Op::Number: return n.value;
            case Op::X: return x;
            case Op::Y: return y;
            case Op::T: return t;
            case Op::Add: return eval(*n.lhs, x, y, t) + eval(*n.rhs, x, y, t);
            case Op::Sub: return eval(*n.lhs, x, y, t) - eval(*n.rhs, x, y, t);
            case Op::Mul: return eval(*n.lhs, x, y, t) * eval(*n.rhs, x, y, t);
            case Op::Div: return eval(*n.lhs, x, y, t) / eval(*n.rhs, x, y, t);
            case Op::Pow: return std::pow(eval(*n.lhs, x, y, t), eval(*n.rhs, x, y, t));
            case Op::Neg: return -eval(*n.lhs, x, y, t);
            case Op::Sin: return std::sin(eval(*n.lhs, x, y, t));
            case Op::Cos: return std::cos(eval(*n.lhs, x, y, t));
            case Op::Exp: return std::exp(eval(*n.lhs, x, y, t));
            case Op::Sqrt: return std::sqrt(eval(*n.lhs, x, y, t));
            case Op::Abs: return std::abs(eval(*n.lhs, x, y, t));
            case Op::Min: return std::min(eval(*n.lhs, x, y, t), eval(*n.rhs, x, y, t));
            case Op::Max: return std::max(eval(*n.lhs, x, y, t), eval(*n.rhs, x, y, t));
        }
        return 0.0;
    }

    std::string text_;
    NodePtr root_;
};

}  // namespace degenmax
