#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <utility>

namespace degenmax {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Failure categories shared by every module.
enum class ErrorKind {
    Config,
    Precondition,
    Classification,
    Evaluation,
    Convergence,
    Unsupported,
    Singular,
    Construction,
    HopfViolation,
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::Config: return "config";
        case ErrorKind::Precondition: return "precondition";
        case ErrorKind::Classification: return "classification";
        case ErrorKind::Evaluation: return "evaluation";
        case ErrorKind::Convergence: return "convergence";
        case ErrorKind::Unsupported: return "unsupported";
        case ErrorKind::Singular: return "singular";
        case ErrorKind::Construction: return "construction";
        case ErrorKind::HopfViolation: return "hopf-violation";
    }
    return "unknown";
}

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(std::string(to_string(kind)) + " error: " + what), kind_(kind), message_(what) {}

    ErrorKind kind() const noexcept { return kind_; }
    /// The message without the kind prefix.
    const std::string& message() const noexcept { return message_; }

private:
    ErrorKind kind_;
    std::string message_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
    throw Error(kind, what);
}

/// 17 significant digits, enough to round-trip any double.
inline std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline std::string format_point(const Vector& x) {
    std::string out = "(";
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (i) out += ", ";
        out += format_double(x[i]);
    }
    return out + ")";
}

inline Vector make_point(std::initializer_list<double> values) {
    Vector v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

/// Largest absolute eigenvalue of a symmetric matrix.
inline double spectral_norm(const Matrix& a) {
    if (a.size() == 0) return 0.0;
    if (a.rows() == 1) return std::abs(a(0, 0));
    Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
}

inline bool all_finite(const Vector& v) { return v.allFinite(); }

}  // namespace degenmax
