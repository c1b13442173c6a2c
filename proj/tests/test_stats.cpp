#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "entangle/stats.hpp"
#include "entangle/synth.hpp"

using namespace entangle;
using Catch::Matchers::WithinAbs;

namespace {
std::span<const double> sp(const std::vector<double>& v) { return {v.data(), v.size()}; }
}

TEST_CASE("incomplete beta sanity") {
    CHECK_THAT(incomplete_beta(1, 1, 0.3), WithinAbs(0.3, 1e-12));
    CHECK_THAT(incomplete_beta(2, 2, 0.5), WithinAbs(0.5, 1e-12));
    for (double x : {0.1, 0.25, 0.5, 0.75, 0.9}) {
        CHECK_THAT(incomplete_beta(2.5, 1.5, x) + incomplete_beta(1.5, 2.5, 1.0 - x),
                   WithinAbs(1.0, 1e-10));
    }
    CHECK(incomplete_beta(3, 4, 0.0) == 0.0);
    CHECK(incomplete_beta(3, 4, 1.0) == 1.0);
}

TEST_CASE("student cdf reproduces standard quantiles") {
    CHECK_THAT(student_cdf(1.812, 10), WithinAbs(0.95, 1e-3));
    CHECK_THAT(student_cdf(1.0, 1), WithinAbs(0.75, 1e-3)); // Cauchy: 1/2 + atan(1)/pi
    CHECK_THAT(student_cdf(0.0, 7), WithinAbs(0.5, 1e-15));
    CHECK_THAT(student_cdf(-1.812, 10) + student_cdf(1.812, 10), WithinAbs(1.0, 1e-12));
    // t with high df approaches the normal quantile.
    CHECK_THAT(student_cdf(1.959964, 100000), WithinAbs(0.975, 1e-4));
}

TEST_CASE("p-value behavior") {
    CHECK(student_p_two_sided(0.0, 5) == 1.0);
    double prev = 1.0;
    for (double t : {0.5, 1.0, 1.5, 2.0, 3.0, 5.0}) {
        const double p = student_p_two_sided(t, 12);
        CHECK(p < prev);
        CHECK_THAT(student_p_two_sided(-t, 12), WithinAbs(p, 1e-14));
        prev = p;
    }
}

TEST_CASE("pearson") {
    SECTION("perfect correlation") {
        const std::vector<double> x{1, 2, 3, 4};
        const Correlation c = pearson(sp(x), sp(x));
        CHECK_THAT(c.r, WithinAbs(1.0, 1e-12));
        CHECK_THAT(c.test.p_two_sided, WithinAbs(0.0, 1e-12));
    }
    SECTION("perfect anticorrelation") {
        const std::vector<double> x{1, 2, 3, 4};
        std::vector<double> y;
        for (double v : x) y.push_back(-v);
        CHECK_THAT(pearson(sp(x), sp(y)).r, WithinAbs(-1.0, 1e-12));
    }
    SECTION("hand-computed covariance") {
        const std::vector<double> x{1, 2, 3};
        const std::vector<double> y{1, 2, 4};
        const Correlation c = pearson(sp(x), sp(y));
        CHECK_THAT(c.r, WithinAbs(0.9819805060619657, 1e-9));
        CHECK(c.test.df == 1.0);
    }
    SECTION("affine invariance and sign flip") {
        const std::vector<double> x{0.3, 1.9, 2.2, 5.0, 3.1};
        const std::vector<double> y{2.0, 0.5, 1.8, 4.4, 2.2};
        const double r0 = pearson(sp(x), sp(y)).r;
        std::vector<double> y_affine;
        for (double v : y) y_affine.push_back(3.5 * v + 11.0);
        CHECK_THAT(pearson(sp(x), sp(y_affine)).r, WithinAbs(r0, 1e-12));
        std::vector<double> y_neg;
        for (double v : y) y_neg.push_back(-v);
        CHECK_THAT(pearson(sp(x), sp(y_neg)).r, WithinAbs(-r0, 1e-12));
    }
    SECTION("zero variance is an undefined-correlation error") {
        const std::vector<double> x{1, 1, 1};
        const std::vector<double> y{1, 2, 3};
        CHECK_THROWS_AS(pearson(sp(x), sp(y)), InputError);
    }
    SECTION("too short") {
        const std::vector<double> x{1, 2};
        CHECK_THROWS_AS(pearson(sp(x), sp(x)), std::invalid_argument);
    }
}

TEST_CASE("two-sample t") {
    SECTION("identical samples give t = 0, p = 1") {
        const std::vector<double> a{1.5, 2.5, 3.5};
        const TestResult r = t_two_sample(sp(a), sp(a));
        CHECK(r.statistic == 0.0);
        CHECK(r.p_two_sided == 1.0);
    }
    SECTION("hand-computed pooled statistic") {
        const std::vector<double> a{1, 2, 3};
        const std::vector<double> b{4, 5, 6};
        const TestResult r = t_two_sample(sp(a), sp(b), TTestMode::pooled);
        CHECK_THAT(r.statistic, WithinAbs(-3.674234614174767, 1e-9));
        CHECK(r.df == 4.0);
    }
    SECTION("swapping the samples negates t") {
        const std::vector<double> a{1.2, 3.4, 2.2, 4.8};
        const std::vector<double> b{2.5, 2.9, 3.3};
        for (auto mode : {TTestMode::pooled, TTestMode::welch}) {
            const TestResult ab = t_two_sample(sp(a), sp(b), mode);
            const TestResult ba = t_two_sample(sp(b), sp(a), mode);
            CHECK_THAT(ab.statistic + ba.statistic, WithinAbs(0.0, 1e-12));
            CHECK_THAT(ab.p_two_sided, WithinAbs(ba.p_two_sided, 1e-12));
        }
    }
    SECTION("sample too small") {
        const std::vector<double> a{1};
        const std::vector<double> b{1, 2};
        CHECK_THROWS_AS(t_two_sample(sp(a), sp(b)), std::invalid_argument);
    }
}

TEST_CASE("t from summaries") {
    SECTION("group-summary reconstructions") {
        const TestResult first = t_from_summary(0.457, 0.070, 55, 0.488, 0.059, 58);
        CHECK(first.df == 111.0);
        CHECK(first.statistic > -2.65);
        CHECK(first.statistic < -2.40);
        CHECK(first.p_two_sided < 0.05);

        const TestResult second = t_from_summary(0.508, 0.061, 66, 0.469, 0.028, 15);
        CHECK(second.df == 79.0);
        CHECK(second.statistic > 2.30);
        CHECK(second.statistic < 2.55);
        CHECK(second.p_two_sided < 0.05);
    }
    SECTION("equal means give t = 0") {
        const TestResult r = t_from_summary(1.0, 0.5, 10, 1.0, 2.5, 8);
        CHECK(r.statistic == 0.0);
        CHECK(r.p_two_sided == 1.0);
    }
    SECTION("raw vectors agree with their own summaries") {
        Xoshiro256ss rng(61);
        for (int trial = 0; trial < 25; ++trial) {
            std::vector<double> a(3 + rng.below(10)), b(3 + rng.below(10));
            for (double& x : a) x = rng.uniform() * 5.0;
            for (double& x : b) x = 1.0 + rng.uniform() * 5.0;
            auto mean_sd = [](const std::vector<double>& xs) {
                double m = 0.0;
                for (double x : xs) m += x;
                m /= static_cast<double>(xs.size());
                double ss = 0.0;
                for (double x : xs) ss += (x - m) * (x - m);
                return std::pair<double, double>(m, std::sqrt(ss / (static_cast<double>(xs.size()) - 1.0)));
            };
            const auto [ma, sa] = mean_sd(a);
            const auto [mb, sb] = mean_sd(b);
            for (auto mode : {TTestMode::pooled, TTestMode::welch}) {
                const TestResult raw = t_two_sample(sp(a), sp(b), mode);
                const TestResult sum = t_from_summary(ma, sa, static_cast<double>(a.size()), mb, sb,
                                                      static_cast<double>(b.size()), mode);
                CHECK_THAT(raw.statistic, WithinAbs(sum.statistic, 1e-12));
                CHECK_THAT(raw.df, WithinAbs(sum.df, 1e-12));
                CHECK_THAT(raw.p_two_sided, WithinAbs(sum.p_two_sided, 1e-12));
            }
        }
    }
    SECTION("welch df sits between the conservative and pooled bounds") {
        const TestResult r = t_from_summary(1.0, 1.0, 10, 0.0, 2.0, 5, TTestMode::welch);
        CHECK(r.df >= 4.0);  // min(n1, n2) - 1
        CHECK(r.df <= 13.0); // n1 + n2 - 2
    }
}

TEST_CASE("report json field names") {
    const TestResult r = t_from_summary(0.457, 0.070, 55, 0.488, 0.059, 58);
    const auto tj = test_result_to_json(r);
    CHECK(tj.contains("t"));
    CHECK(tj.contains("df"));
    CHECK(tj.contains("p"));
    CHECK(tj.at("df") == 111.0);

    const std::vector<double> x{1, 2, 3, 4, 5};
    const std::vector<double> y{1.2, 2.1, 2.8, 4.4, 4.9};
    const auto cj = correlation_to_json(pearson(sp(x), sp(y)));
    CHECK(cj.contains("r"));
    CHECK(cj.contains("t"));
    CHECK(cj.contains("df"));
    CHECK(cj.contains("p"));
    CHECK(cj.at("r").get<double>() > 0.9);
}
