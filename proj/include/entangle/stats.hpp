#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <stdexcept>

#include <json.hpp>

#include "entangle/common.hpp"

namespace entangle {

/// Outcome of a significance test.
struct TestResult {
    double statistic = 0.0;
    double df = 0.0;
    double p_two_sided = 1.0;
};

namespace detail {

/// Continued fraction for the regularized incomplete beta (modified Lentz).
inline double ibeta_cf(double a, double b, double x) {
    constexpr double kTiny = 1e-300;
    constexpr double kEps = 1e-15;
    constexpr int kMaxIter = 400;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < kEps) break;
    }
    return h;
}

} // namespace detail

/// Regularized incomplete beta I_x(a, b), accurate to ~1e-10 over the
/// parameter ranges a t distribution needs.
inline double incomplete_beta(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::invalid_argument("incomplete_beta needs a, b > 0");
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    if (x < (a + 1.0) / (a + b + 2.0)) return front * detail::ibeta_cf(a, b, x) / a;
    return 1.0 - front * detail::ibeta_cf(b, a, 1.0 - x) / b;
}

/// P(T_df <= t) for Student's t.
inline double student_cdf(double t, double df) {
    if (!(df > 0.0)) throw std::invalid_argument("student_cdf needs df > 0");
    if (t == 0.0) return 0.5;
    if (std::isinf(t)) return t > 0.0 ? 1.0 : 0.0;
    const double x = df / (df + t * t);
    const double tail = 0.5 * incomplete_beta(df / 2.0, 0.5, x);
    return t > 0.0 ? 1.0 - tail : tail;
}

/// Two-sided p for a t statistic.
inline double student_p_two_sided(double t, double df) {
    if (t == 0.0) return 1.0;
    if (std::isinf(t)) return 0.0;
    const double x = df / (df + t * t);
    return incomplete_beta(df / 2.0, 0.5, x);
}

struct Correlation {
    double r = 0.0;
    TestResult test;
};

/// Pearson correlation with the exact t-based two-sided p-value
/// (t = r sqrt((n-2)/(1-r^2)), df = n-2).
inline Correlation pearson(std::span<const double> x, std::span<const double> y) {
    const std::size_t n = x.size();
    if (n != y.size()) throw std::invalid_argument("pearson needs equal-length samples");
    if (n < 3) throw std::invalid_argument("pearson needs n >= 3");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw InputError("correlation undefined: a sample has zero variance");
    double r = sxy / std::sqrt(sxx * syy);
    r = std::clamp(r, -1.0, 1.0);

    Correlation result;
    result.r = r;
    result.test.df = static_cast<double>(n - 2);
    const double one_minus_r2 = 1.0 - r * r;
    if (one_minus_r2 <= 0.0) {
        result.test.statistic = r > 0.0 ? std::numeric_limits<double>::infinity()
                                        : -std::numeric_limits<double>::infinity();
        result.test.p_two_sided = 0.0;
    } else {
        result.test.statistic = r * std::sqrt(result.test.df / one_minus_r2);
        result.test.p_two_sided = student_p_two_sided(result.test.statistic, result.test.df);
    }
    return result;
}

enum class TTestMode { pooled, welch };

/// Two-sample t from group summaries (sample SDs, n-1 denominator).
/// Pooled uses the classic Student statistic with df = n1+n2-2; welch uses
/// the Welch statistic with Welch-Satterthwaite df.
inline TestResult t_from_summary(double mean1, double sd1, double n1, double mean2, double sd2,
                                 double n2, TTestMode mode = TTestMode::pooled) {
    if (n1 < 2.0 || n2 < 2.0) throw std::invalid_argument("t test needs n >= 2 per sample");
    if (sd1 < 0.0 || sd2 < 0.0) throw std::invalid_argument("negative standard deviation");
    const double v1 = sd1 * sd1;
    const double v2 = sd2 * sd2;
    TestResult result;
    double se = 0.0;
    if (mode == TTestMode::pooled) {
        const double df = n1 + n2 - 2.0;
        const double pooled_var = ((n1 - 1.0) * v1 + (n2 - 1.0) * v2) / df;
        se = std::sqrt(pooled_var * (1.0 / n1 + 1.0 / n2));
        result.df = df;
    } else {
        const double a = v1 / n1;
        const double b = v2 / n2;
        se = std::sqrt(a + b);
        result.df = se == 0.0 ? n1 + n2 - 2.0
                              : (a + b) * (a + b) / (a * a / (n1 - 1.0) + b * b / (n2 - 1.0));
    }
    const double diff = mean1 - mean2;
    if (se == 0.0) {
        result.statistic = diff == 0.0 ? 0.0
                                       : std::copysign(std::numeric_limits<double>::infinity(), diff);
        result.p_two_sided = diff == 0.0 ? 1.0 : 0.0;
        return result;
    }
    result.statistic = diff / se;
    result.p_two_sided = student_p_two_sided(result.statistic, result.df);
    return result;
}

/// Report serialization: fields `t`, `df`, `p` (plus `r` for correlations).
inline nlohmann::ordered_json test_result_to_json(const TestResult& result) {
    nlohmann::ordered_json j;
    j["t"] = round_sig12(result.statistic);
    j["df"] = round_sig12(result.df);
    j["p"] = round_sig12(result.p_two_sided);
    return j;
}

inline nlohmann::ordered_json correlation_to_json(const Correlation& corr) {
    nlohmann::ordered_json j;
    j["r"] = round_sig12(corr.r);
    j["t"] = round_sig12(corr.test.statistic);
    j["df"] = round_sig12(corr.test.df);
    j["p"] = round_sig12(corr.test.p_two_sided);
    return j;
}

/// Two-sample t from raw vectors; agrees with t_from_summary on the
/// vectors' exact mean/SD/n.
inline TestResult t_two_sample(std::span<const double> a, std::span<const double> b,
                               TTestMode mode = TTestMode::pooled) {
    if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("t test needs n >= 2 per sample");
    auto summarize = [](std::span<const double> xs, double& mean, double& sd) {
        double m = 0.0;
        for (double x : xs) m += x;
        m /= static_cast<double>(xs.size());
        double ss = 0.0;
        for (double x : xs) ss += (x - m) * (x - m);
        mean = m;
        sd = std::sqrt(ss / (static_cast<double>(xs.size()) - 1.0));
    };
    double m1, s1, m2, s2;
    summarize(a, m1, s1);
    summarize(b, m2, s2);
    return t_from_summary(m1, s1, static_cast<double>(a.size()), m2, s2,
                          static_cast<double>(b.size()), mode);
}

} // namespace entangle
