#pragma once
// Standard-Normal special functions, log-space probability helpers, adaptive
// quadrature and bracketed root finding. Everything here is a pure function.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "nonsig/errors.hpp"

namespace nonsig {

inline constexpr double kInvSqrt2Pi = 0.398942280401432677939946059934381868;
inline constexpr double kLogSqrt2Pi = 0.918938533204672741780329736405617640;
inline constexpr double kNegInf = -std::numeric_limits<double>::infinity();
inline constexpr double kPosInf = std::numeric_limits<double>::infinity();

namespace detail {

inline void require_finite(double x, const char* who) {
    if (!std::isfinite(x)) {
        throw DomainError(std::string(who) + ": non-finite argument");
    }
}

// Below this point erfc underflows and the asymptotic series takes over.
inline constexpr double kLogCdfSeriesCutoff = -37.0;

// log Phi(x) for x <= -37 from the Mills-ratio asymptotic series
//   Phi(x) ~ phi(x)/|x| * (1 - 1/x^2 + 3/x^4 - 15/x^6 + ...).
// Truncation error at |x| = 37 is below 1e-17.
inline double log_cdf_lower_tail_series(double x) {
    const double inv_x2 = 1.0 / (x * x);
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k <= 10; ++k) {
        term *= -static_cast<double>(2 * k - 1) * inv_x2;
        sum += term;
    }
    return -0.5 * x * x - std::log(-x) - kLogSqrt2Pi + std::log(sum);
}

// log Phi(x) that also accepts +-infinity (used for event boundaries).
inline double log_cdf_extended(double x) {
    if (x == kNegInf) return kNegInf;
    if (x == kPosInf) return 0.0;
    if (x < kLogCdfSeriesCutoff) return log_cdf_lower_tail_series(x);
    if (x < 0.0) return std::log(0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0));
    return std::log1p(-0.5 * std::erfc(x * std::numbers::sqrt2 / 2.0));
}

inline double cdf_extended(double x) {
    if (x == kNegInf) return 0.0;
    if (x == kPosInf) return 1.0;
    return 0.5 * std::erfc(-x * std::numbers::sqrt2 / 2.0);
}

}  // namespace detail

/// Standard Normal density (2 pi)^(-1/2) exp(-x^2/2).
inline double std_normal_pdf(double x) {
    detail::require_finite(x, "std_normal_pdf");
    return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

inline double log_std_normal_pdf(double x) {
    detail::require_finite(x, "log_std_normal_pdf");
    return -0.5 * x * x - kLogSqrt2Pi;
}

/// Standard Normal CDF via erfc. Accurate in relative terms through the lower
/// tail until the result underflows (x < -37.5); use log_std_normal_cdf there.
inline double std_normal_cdf(double x) {
    detail::require_finite(x, "std_normal_cdf");
    return detail::cdf_extended(x);
}

/// log Phi(x), finite for every finite x.
inline double log_std_normal_cdf(double x) {
    detail::require_finite(x, "log_std_normal_cdf");
    return detail::log_cdf_extended(x);
}

/// Inverse of the standard Normal CDF.
///
/// Acklam's rational approximation (relative error ~1e-9) polished with
/// Halley steps against std_normal_cdf. Exactly antisymmetric:
/// quantile(1 - p) == -quantile(p).
inline double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("std_normal_quantile: probability must lie in (0, 1)");
    }
    if (p == 0.5) return 0.0;
    if (p > 0.5) return -std_normal_quantile(1.0 - p);

    static constexpr double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                                   -2.759285104469687e+02, 1.383577518672690e+02,
                                   -3.066479806614716e+01, 2.506628277459239e+00};
    static constexpr double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                                   -1.556989798598866e+02, 6.680131188771972e+01,
                                   -1.328068155288572e+01};
    static constexpr double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                                   -2.400758277161838e+00, -2.549732539343734e+00,
                                   4.374664141464968e+00,  2.938163982698783e+00};
    static constexpr double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                                   2.445134137142996e+00, 3.754408661907416e+00};

    double x;
    if (p < 0.02425) {
        const double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else {
        const double q = p - 0.5;
        const double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    }

    for (int step = 0; step < 2; ++step) {
        const double e = detail::cdf_extended(x) - p;
        const double u = e * std::exp(0.5 * x * x + kLogSqrt2Pi);
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

// ---------------------------------------------------------------------------
// Log-space arithmetic

/// log(exp(a) + exp(b)).
inline double log_add_exp(double a, double b) {
    if (a == kNegInf) return b;
    if (b == kNegInf) return a;
    const double hi = std::max(a, b);
    const double lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

/// log(exp(a) - exp(b)) for a >= b. Returns -inf when a == b.
inline double log_diff_exp(double a, double b) {
    if (b == kNegInf) return a;
    if (b > a) throw DomainError("log_diff_exp: second argument exceeds the first");
    const double delta = b - a;
    // log(1 - e^delta): switch formula at -ln 2 for accuracy.
    const double tail = delta > -std::numbers::ln2 ? std::log(-std::expm1(delta))
                                                   : std::log1p(-std::exp(delta));
    return a + tail;
}

/// log(1 - exp(a)) for a <= 0.
inline double log1m_exp(double a) { return log_diff_exp(0.0, a); }

/// log(Phi(hi) - Phi(lo)) for lo <= hi; either bound may be infinite.
inline double log_normal_interval_probability(double lo, double hi) {
    if (std::isnan(lo) || std::isnan(hi)) {
        throw DomainError("log_normal_interval_probability: NaN bound");
    }
    if (!(lo < hi)) return kNegInf;
    if (lo > 0.0) {
        // Mirror into the lower half line where the CDF keeps relative precision.
        const double mirrored_lo = -hi;
        hi = -lo;
        lo = mirrored_lo;
    }
    if (hi <= 0.0) {
        return log_diff_exp(detail::log_cdf_extended(hi), detail::log_cdf_extended(lo));
    }
    // lo <= 0 < hi: both erf terms are non-negative, no cancellation.
    const double upper = std::erf(hi * std::numbers::sqrt2 / 2.0);
    const double lower = lo == kNegInf ? 1.0 : -std::erf(lo * std::numbers::sqrt2 / 2.0);
    return std::log(0.5 * (upper + lower));
}

// ---------------------------------------------------------------------------
// Quadrature

struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    double width() const noexcept { return hi - lo; }
    bool contains(double x) const noexcept { return x >= lo && x <= hi; }
};

struct QuadratureSpec {
    double abs_tol = 1e-12;
    double rel_tol = 1e-10;
    std::size_t max_subdivisions = std::size_t{1} << 16;
    double tail_halfwidth_sigmas = 10.0;

    void validate() const {
        if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) {
            throw PreconditionError("QuadratureSpec: tolerances must be positive");
        }
        if (max_subdivisions < 1) {
            throw PreconditionError("QuadratureSpec: max_subdivisions must be >= 1");
        }
        if (!(tail_halfwidth_sigmas >= 6.0)) {
            throw PreconditionError("QuadratureSpec: tail_halfwidth_sigmas must be >= 6");
        }
    }
};

/// Integration window centered on `center` extending `spec.tail_halfwidth_sigmas`
/// spreads on each side.
inline Interval tail_window(double center, double spread, const QuadratureSpec& spec = {}) {
    return {center - spec.tail_halfwidth_sigmas * spread,
            center + spec.tail_halfwidth_sigmas * spread};
}

namespace detail {

struct SimpsonPanel {
    double a, b;
    double fa, fq1, fm, fq3, fb;
    double estimate;
    double error;

    bool operator<(const SimpsonPanel& other) const noexcept { return error < other.error; }
};

template <class F>
double checked_eval(F& f, double x) {
    const double y = static_cast<double>(f(x));
    if (!std::isfinite(y)) {
        throw DomainError("integrate: integrand is not finite at x = " + std::to_string(x));
    }
    return y;
}

template <class F>
SimpsonPanel make_panel(F& f, double a, double b, double fa, double fm, double fb) {
    const double m = 0.5 * (a + b);
    const double fq1 = checked_eval(f, 0.5 * (a + m));
    const double fq3 = checked_eval(f, 0.5 * (m + b));
    const double h = b - a;
    const double coarse = h / 6.0 * (fa + 4.0 * fm + fb);
    const double fine = h / 12.0 * (fa + 4.0 * fq1 + 2.0 * fm + 4.0 * fq3 + fb);
    const double diff = fine - coarse;
    // Panels that can no longer be split in floating point are treated as exact.
    const bool resolvable = m > a && m < b && 0.5 * (a + m) > a && 0.5 * (m + b) < b;
    return {a, b, fa, fq1, fm, fq3, fb, fine + diff / 15.0,
            resolvable ? std::abs(diff) / 15.0 : 0.0};
}

}  // namespace detail

/// Globally adaptive Simpson quadrature of `f` over `window`.
///
/// `breakpoints` inside the window split it into segments that are always
/// sampled; narrow features of the integrand must be announced this way.
/// Throws ConvergenceError (carrying the best estimate) when the subdivision
/// budget runs out before the error estimate drops below
/// max(abs_tol, rel_tol * |result|).
template <class F>
double integrate(F&& f, Interval window, const QuadratureSpec& spec = {},
                 std::span<const double> breakpoints = {}) {
    spec.validate();
    if (!std::isfinite(window.lo) || !std::isfinite(window.hi)) {
        throw DomainError("integrate: window bounds must be finite");
    }
    if (window.lo == window.hi) return 0.0;
    double sign = 1.0;
    if (window.lo > window.hi) {
        std::swap(window.lo, window.hi);
        sign = -1.0;
    }

    std::vector<double> nodes{window.lo, window.hi};
    for (double x : breakpoints) {
        if (x > window.lo && x < window.hi) nodes.push_back(x);
    }
    std::sort(nodes.begin(), nodes.end());
    nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());

    constexpr int kPanelsPerSegment = 4;
    std::priority_queue<detail::SimpsonPanel> panels;
    double total = 0.0;
    double total_error = 0.0;
    for (std::size_t s = 0; s + 1 < nodes.size(); ++s) {
        const double h = (nodes[s + 1] - nodes[s]) / kPanelsPerSegment;
        for (int k = 0; k < kPanelsPerSegment; ++k) {
            const double a = nodes[s] + k * h;
            const double b = k + 1 == kPanelsPerSegment ? nodes[s + 1] : a + h;
            const double fa = detail::checked_eval(f, a);
            const double fm = detail::checked_eval(f, 0.5 * (a + b));
            const double fb = detail::checked_eval(f, b);
            auto panel = detail::make_panel(f, a, b, fa, fm, fb);
            total += panel.estimate;
            total_error += panel.error;
            panels.push(panel);
        }
    }

    std::size_t subdivisions = 0;
    auto tolerance = [&] { return std::max(spec.abs_tol, spec.rel_tol * std::abs(total)); };
    while (total_error > tolerance()) {
        if (panels.top().error == 0.0) break;
        if (subdivisions >= spec.max_subdivisions) {
            throw ConvergenceError("integrate: subdivision budget exhausted", sign * total,
                                   total_error);
        }
        const detail::SimpsonPanel worst = panels.top();
        panels.pop();
        const double m = 0.5 * (worst.a + worst.b);
        auto left = detail::make_panel(f, worst.a, m, worst.fa, worst.fq1, worst.fm);
        auto right = detail::make_panel(f, m, worst.b, worst.fm, worst.fq3, worst.fb);
        total += left.estimate + right.estimate - worst.estimate;
        total_error += left.error + right.error - worst.error;
        panels.push(left);
        panels.push(right);
        ++subdivisions;

        // Resynchronize the running sums so cancellation cannot accumulate.
        if (subdivisions % 4096 == 0) {
            auto copy = panels;
            total = 0.0;
            total_error = 0.0;
            while (!copy.empty()) {
                total += copy.top().estimate;
                total_error += copy.top().error;
                copy.pop();
            }
        }
    }

    // Final sum from smallest to largest contribution.
    std::vector<double> parts;
    parts.reserve(panels.size());
    while (!panels.empty()) {
        parts.push_back(panels.top().estimate);
        panels.pop();
    }
    std::sort(parts.begin(), parts.end(),
              [](double x, double y) { return std::abs(x) < std::abs(y); });
    double result = 0.0;
    for (double v : parts) result += v;
    return sign * result;
}

// ---------------------------------------------------------------------------
// Root finding

struct Bracket {
    double lo = 0.0;
    double hi = 0.0;
};

/// Root of a continuous f on a sign-changing bracket.
///
/// Secant steps are taken while they stay strictly inside the bracket and keep
/// halving it; otherwise the step is a bisection, so convergence is
/// guaranteed. Stops on an exact zero or when the bracket is narrower than tol.
template <class F>
double find_root(F&& f, Bracket bracket, double tol) {
    if (!(bracket.lo < bracket.hi) || !std::isfinite(bracket.lo) || !std::isfinite(bracket.hi)) {
        throw PreconditionError("find_root: bracket requires finite lo < hi");
    }
    if (!(tol > 0.0)) throw PreconditionError("find_root: tol must be positive");

    double lo = bracket.lo;
    double hi = bracket.hi;
    double f_lo = f(lo);
    double f_hi = f(hi);
    if (std::isnan(f_lo) || std::isnan(f_hi)) {
        throw DomainError("find_root: function is NaN at a bracket end");
    }
    if (f_lo == 0.0) return lo;
    if (f_hi == 0.0) return hi;
    if ((f_lo < 0.0) == (f_hi < 0.0)) {
        throw BracketError("find_root: no sign change on bracket", lo, hi, f_lo, f_hi);
    }

    bool force_bisection = false;
    for (int iter = 0; iter < 2000; ++iter) {
        const double width = hi - lo;
        if (width < tol) break;

        double x = 0.5 * (lo + hi);
        bool secant = false;
        if (!force_bisection && std::isfinite(f_lo) && std::isfinite(f_hi)) {
            const double s = hi - f_hi * (hi - lo) / (f_hi - f_lo);
            if (s > lo && s < hi) {
                x = s;
                secant = true;
            }
        }
        if (!(x > lo && x < hi)) break;  // bracket at floating-point resolution

        const double fx = f(x);
        if (std::isnan(fx)) throw DomainError("find_root: function is NaN inside bracket");
        if (fx == 0.0) return x;
        if ((fx < 0.0) == (f_lo < 0.0)) {
            lo = x;
            f_lo = fx;
        } else {
            hi = x;
            f_hi = fx;
        }
        force_bisection = secant && (hi - lo) > 0.5 * width;
    }
    return std::abs(f_lo) < std::abs(f_hi) ? lo : hi;
}

}  // namespace nonsig
