#pragma once

#include "degenmax/common.hpp"

#include <array>
#include <cmath>
#include <string>

namespace degenmax::special {

/// Parameters of the confluent hypergeometric functions M(a,b,x) and U(a,b,x).
struct HypergeometricParams {
    double a = 0.0;
    double b = 1.0;
    double series_tol = 1e-16;
    int max_terms = 2000;
};

/// Thrown when the power series does not settle within max_terms.
class SeriesTruncationError : public Error {
public:
    SeriesTruncationError(const std::string& what, double last_term)
        : Error(ErrorKind::Convergence, what), last_term_(last_term) {}

    double last_term() const noexcept { return last_term_; }

private:
    double last_term_;
};

inline bool is_integer(double x) { return std::isfinite(x) && x == std::round(x); }

inline bool is_nonpositive_integer(double x) { return is_integer(x) && x <= 0.0; }

/// Γ(x), rejecting the poles.
inline double gamma_fn(double x) {
    if (is_nonpositive_integer(x)) {
        fail(ErrorKind::Evaluation, "gamma pole at " + format_double(x));
    }
    return std::tgamma(x);
}

/// 1/Γ(x), zero at the poles of Γ.
inline double reciprocal_gamma(double x) {
    if (is_nonpositive_integer(x)) return 0.0;
    return 1.0 / gamma_fn(x);
}

/// Rising factorial (b)_n = b(b+1)...(b+n-1), with (b)_0 = 1.
inline double pochhammer(double b, int n) {
    double out = 1.0;
    for (int k = 0; k < n; ++k) out *= b + k;
    return out;
}

inline double binomial(int n, int k) {
    double out = 1.0;
    for (int i = 1; i <= k; ++i) out = out * (n - k + i) / i;
    return out;
}

namespace detail {

inline double kummer_series(double a, double b, double x, double tol, int max_terms) {
    double term = 1.0;
    double sum = 1.0;
    int small_run = 0;
    for (int n = 0; n < max_terms; ++n) {
        term *= (a + n) * x / ((b + n) * (n + 1));
        sum += term;
        if (std::abs(term) <= tol * std::abs(sum)) {
            if (++small_run == 3) return sum;
        } else {
            small_run = 0;
        }
    }
    throw SeriesTruncationError("M series did not converge within max_terms at x = " + format_double(x),
                                std::abs(term));
}

/// U(-n, b, x) as the terminating polynomial.
inline double tricomi_U_polynomial(int n, double b, double x) {
    double sum = 0.0;
    for (int s = 0; s <= n; ++s) {
        sum += binomial(n, s) * pochhammer(b + s, n - s) * std::pow(-x, s);
    }
    return (n % 2 == 0) ? sum : -sum;
}

}  // namespace detail

inline void validate(const HypergeometricParams& p) {
    if (p.max_terms < 1) fail(ErrorKind::Precondition, "max_terms must be >= 1");
    if (!(p.series_tol > 0.0)) fail(ErrorKind::Precondition, "series_tol must be positive");
    if (!std::isfinite(p.a) || !std::isfinite(p.b)) fail(ErrorKind::Precondition, "non-finite parameter");
}

/// Kummer's function M(a,b,x) by its power series.
inline double kummer_M(const HypergeometricParams& p, double x) {
    validate(p);
    if (is_nonpositive_integer(p.b)) {
        fail(ErrorKind::Precondition, "M undefined for b = " + format_double(p.b));
    }
    if (!std::isfinite(x)) fail(ErrorKind::Precondition, "non-finite argument");
    if (x == 0.0) return 1.0;
    if (x < -1.0 && !is_nonpositive_integer(p.a)) {
        return std::exp(x) * detail::kummer_series(p.b - p.a, p.b, -x, p.series_tol, p.max_terms);
    }
    return detail::kummer_series(p.a, p.b, x, p.series_tol, p.max_terms);
}

/// M'(a,b,x) = (a/b) M(a+1,b+1,x).
inline double kummer_M_derivative(const HypergeometricParams& p, double x) {
    validate(p);
    if (p.b == 0.0 || is_nonpositive_integer(p.b)) {
        fail(ErrorKind::Precondition, "M' undefined for b = " + format_double(p.b));
    }
    if (p.a == 0.0) return 0.0;
    HypergeometricParams q = p;
    q.a += 1.0;
    q.b += 1.0;
    return p.a / p.b * kummer_M(q, x);
}

/// Tricomi's function U(a,b,x) for x > 0.
///
/// Non-integer b uses the Gamma/M connection formula. Integer b is accepted only
/// where U reduces to a closed form: a = 0, a = -n, or a = b - 1 - n.
inline double tricomi_U(const HypergeometricParams& p, double x) {
    validate(p);
    if (!(x > 0.0)) fail(ErrorKind::Precondition, "U requires x > 0, got " + format_double(x));
    const double a = p.a;
    const double b = p.b;
    if (a == 0.0) return 1.0;
    if (is_nonpositive_integer(a)) {
        return detail::tricomi_U_polynomial(static_cast<int>(-a), b, x);
    }
    const double shifted = a - b + 1.0;
    if (is_nonpositive_integer(shifted)) {
        const int n = static_cast<int>(-shifted);
        return std::pow(x, 1.0 - b) * detail::tricomi_U_polynomial(n, 2.0 - b, x);
    }
    if (is_integer(b)) {
        fail(ErrorKind::Unsupported,
             "U with integer b = " + format_double(b) + " is only available in closed-form cases");
    }
    HypergeometricParams m1 = p;
    HypergeometricParams m2 = p;
    m2.a = shifted;
    m2.b = 2.0 - b;
    const double c1 = gamma_fn(1.0 - b) * reciprocal_gamma(shifted);
    const double c2 = gamma_fn(b - 1.0) * reciprocal_gamma(a);
    double out = 0.0;
    if (c1 != 0.0) out += c1 * kummer_M(m1, x);
    if (c2 != 0.0) out += c2 * std::pow(x, 1.0 - b) * kummer_M(m2, x);
    return out;
}

/// U'(a,b,x) = -a U(a+1,b+1,x).
inline double tricomi_U_derivative(const HypergeometricParams& p, double x) {
    validate(p);
    if (p.a == 0.0) return 0.0;
    HypergeometricParams q = p;
    q.a += 1.0;
    q.b += 1.0;
    return -p.a * tricomi_U(q, x);
}

enum class URegularity { C_inf, C0_not_C1, C0_only_if_b_in_0_1, not_C0 };

inline const char* to_string(URegularity r) {
    switch (r) {
        case URegularity::C_inf: return "C_inf";
        case URegularity::C0_not_C1: return "C0_not_C1";
        case URegularity::C0_only_if_b_in_0_1: return "C0_only_if_b_in_(0,1)";
        case URegularity::not_C0: return "not_C0";
    }
    return "unknown";
}

/// Regularity of U(a,b,.) on [0,inf) for a, b >= 0.
inline URegularity classify_U_regularity(double a, double b) {
    if (!std::isfinite(a) || !std::isfinite(b) || a < 0.0 || b < 0.0) {
        fail(ErrorKind::Precondition, "regularity classification covers a >= 0, b >= 0 only");
    }
    if (a == 0.0) return URegularity::C_inf;
    const double n = b - 1.0 - a;
    const bool closed_form = is_integer(n) && n >= 0.0 && n <= b - 1.0;
    if (closed_form) {
        if (b == 0.0) return URegularity::C0_only_if_b_in_0_1;
        if (b <= 1.0) return URegularity::C0_not_C1;
        return URegularity::not_C0;
    }
    if (b == 0.0) return URegularity::C0_only_if_b_in_0_1;
    if (b < 1.0) return URegularity::C0_not_C1;
    return URegularity::not_C0;
}

}  // namespace degenmax::special
