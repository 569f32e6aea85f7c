// stats.hpp
// Two-sample t-tests (pooled and Welch), Pearson and Spearman correlation,
// and the Student t distribution via the regularized incomplete beta function.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace chessprob::stats {

enum class StatsErrorCode { LengthMismatch, TooFewSamples, ConstantInput, ZeroVariance, BadArgument };

class StatsError : public std::domain_error {
public:
    StatsError(StatsErrorCode code, const std::string& what) : std::domain_error(what), code_(code) {}
    StatsErrorCode code() const noexcept { return code_; }

private:
    StatsErrorCode code_;
};

// ---------------------------------------------------------------------------
// Special functions

namespace detail {

// Continued fraction for I_x(a, b), evaluated with the modified Lentz method.
// Converges quickly for x < (a + 1) / (a + b + 2).
inline double beta_continued_fraction(double a, double b, double x) {
    constexpr int kMaxIter = 10000;
    constexpr double kEps = 1e-16;
    constexpr double kTiny = 1e-300;
    const double qab = a + b, qap = a + 1.0, qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny)
        d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const int m2 = 2 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny)
            d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny)
            c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny)
            d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny)
            c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kEps)
            break;
    }
    return h;
}

} // namespace detail

// Regularized incomplete beta function I_x(a, b) for a, b > 0, x in [0, 1].
inline double incomplete_beta(double a, double b, double x) {
    if (!(a > 0) || !(b > 0) || !(x >= 0) || !(x <= 1))
        throw StatsError(StatsErrorCode::BadArgument, "incomplete_beta: argument out of range");
    if (x == 0 || x == 1)
        return x;
    const double log_front =
        std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(log_front);
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * detail::beta_continued_fraction(a, b, x) / a;
    return 1.0 - front * detail::beta_continued_fraction(b, a, 1.0 - x) / b;
}

// P(|T| >= |t|) for Student's t with `df` degrees of freedom.
inline double t_two_tailed_p(double t, double df) {
    if (!(df > 0))
        throw StatsError(StatsErrorCode::BadArgument, "degrees of freedom must be positive");
    if (std::isinf(t))
        return 0.0;
    return incomplete_beta(df / 2.0, 0.5, df / (df + t * t));
}

inline double t_cdf(double t, double df) {
    const double tail = t_two_tailed_p(t, df) / 2.0;
    return t < 0 ? tail : 1.0 - tail;
}

// ---------------------------------------------------------------------------
// t-tests

enum class TestKind { Pooled, Welch };

inline const char* to_string(TestKind k) { return k == TestKind::Pooled ? "pooled" : "welch"; }

struct Summary {
    double mean = 0;
    double sd = 0; // sample standard deviation (n - 1 denominator)
    std::size_t n = 0;
};

struct StatsResult {
    double t = 0;
    double df = 0;
    double p_two_tailed = 1;
    TestKind test_kind = TestKind::Welch;
};

inline double mean(std::span<const double> xs) {
    if (xs.empty())
        throw StatsError(StatsErrorCode::TooFewSamples, "mean of empty sample");
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

inline Summary summarize(std::span<const double> xs) {
    if (xs.size() < 2)
        throw StatsError(StatsErrorCode::TooFewSamples, "need at least two observations");
    const double m = mean(xs);
    double ss = 0;
    for (double x : xs)
        ss += (x - m) * (x - m);
    return Summary{m, std::sqrt(ss / static_cast<double>(xs.size() - 1)), xs.size()};
}

inline StatsResult t_test_from_summary(const Summary& a, const Summary& b, TestKind kind) {
    if (a.n < 2 || b.n < 2)
        throw StatsError(StatsErrorCode::TooFewSamples, "t-test needs n >= 2 in both samples");
    if (a.sd < 0 || b.sd < 0)
        throw StatsError(StatsErrorCode::BadArgument, "negative standard deviation");
    const double na = static_cast<double>(a.n), nb = static_cast<double>(b.n);
    const double va = a.sd * a.sd, vb = b.sd * b.sd;
    const double diff = a.mean - b.mean;

    StatsResult r;
    r.test_kind = kind;
    double se2;
    if (kind == TestKind::Pooled) {
        r.df = na + nb - 2.0;
        const double pooled = ((na - 1.0) * va + (nb - 1.0) * vb) / r.df;
        se2 = pooled * (1.0 / na + 1.0 / nb);
    } else {
        const double qa = va / na, qb = vb / nb;
        se2 = qa + qb;
        r.df = se2 > 0 ? se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0)) : na + nb - 2.0;
    }
    if (se2 == 0) {
        if (diff == 0)
            throw StatsError(StatsErrorCode::ZeroVariance, "both samples constant with equal means: t undefined");
        r.t = diff > 0 ? std::numeric_limits<double>::infinity() : -std::numeric_limits<double>::infinity();
        r.p_two_tailed = 0;
        return r;
    }
    r.t = diff / std::sqrt(se2);
    r.p_two_tailed = t_two_tailed_p(r.t, r.df);
    return r;
}

inline StatsResult t_test_from_summary(double mean_a, double sd_a, std::size_t n_a, double mean_b, double sd_b,
                                       std::size_t n_b, TestKind kind) {
    return t_test_from_summary(Summary{mean_a, sd_a, n_a}, Summary{mean_b, sd_b, n_b}, kind);
}

inline StatsResult t_test(std::span<const double> a, std::span<const double> b, TestKind kind) {
    return t_test_from_summary(summarize(a), summarize(b), kind);
}

inline bool significance_at(double alpha, double p_two_tailed) {
    if (!(alpha > 0 && alpha < 1))
        throw StatsError(StatsErrorCode::BadArgument, "alpha must lie in (0, 1)");
    return p_two_tailed < alpha;
}

inline bool significance_at(double alpha, const StatsResult& r) { return significance_at(alpha, r.p_two_tailed); }

// ---------------------------------------------------------------------------
// Correlation

inline void check_pair(std::span<const double> xs, std::span<const double> ys) {
    if (xs.size() != ys.size())
        throw StatsError(StatsErrorCode::LengthMismatch,
                         "length mismatch: " + std::to_string(xs.size()) + " vs " + std::to_string(ys.size()));
    if (xs.size() < 3)
        throw StatsError(StatsErrorCode::TooFewSamples, "correlation needs at least three pairs");
}

inline double pearson(std::span<const double> xs, std::span<const double> ys) {
    check_pair(xs, ys);
    const double mx = mean(xs), my = mean(ys);
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0 || syy == 0)
        throw StatsError(StatsErrorCode::ConstantInput, "correlation undefined for a constant vector");
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

// 1-based ranks with ties sharing the average of their positions.
inline std::vector<double> midranks(std::span<const double> xs) {
    std::vector<std::size_t> order(xs.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return xs[a] < xs[b]; });
    std::vector<double> ranks(xs.size());
    for (std::size_t i = 0; i < order.size();) {
        std::size_t j = i;
        while (j + 1 < order.size() && xs[order[j + 1]] == xs[order[i]])
            ++j;
        const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k)
            ranks[order[k]] = avg;
        i = j + 1;
    }
    return ranks;
}

inline double spearman(std::span<const double> xs, std::span<const double> ys) {
    check_pair(xs, ys);
    const auto rx = midranks(xs), ry = midranks(ys);
    return pearson(rx, ry);
}

// Two-tailed p for a correlation coefficient via t = r sqrt((n-2)/(1-r^2)).
inline double correlation_p(double r, std::size_t n) {
    if (n < 3)
        throw StatsError(StatsErrorCode::TooFewSamples, "correlation needs at least three pairs");
    if (std::fabs(r) >= 1.0)
        return 0.0;
    const double df = static_cast<double>(n - 2);
    return t_two_tailed_p(r * std::sqrt(df / (1.0 - r * r)), df);
}

inline constexpr std::size_t kExactSpearmanMaxN = 10;

// Spearman p-value: exact permutation distribution for n <= 10, the
// t approximation above that.
inline double spearman_p(std::span<const double> xs, std::span<const double> ys) {
    const double rho = spearman(xs, ys);
    if (xs.size() > kExactSpearmanMaxN)
        return correlation_p(rho, xs.size());
    const auto rx = midranks(xs);
    auto ry = midranks(ys);
    std::sort(ry.begin(), ry.end());
    std::size_t extreme = 0, total = 0;
    do {
        ++total;
        if (std::fabs(pearson(rx, ry)) >= std::fabs(rho) - 1e-12)
            ++extreme;
    } while (std::next_permutation(ry.begin(), ry.end()));
    return static_cast<double>(extreme) / static_cast<double>(total);
}

struct CorrelationReport {
    double rho = 0;     // Spearman
    double r = 0;       // Pearson
    std::size_t n = 0;
    double p_value = 1; // two-tailed, for rho
    bool significant_at_1pct = false;
};

inline CorrelationReport correlate(std::span<const double> xs, std::span<const double> ys) {
    CorrelationReport c;
    c.rho = spearman(xs, ys);
    c.r = pearson(xs, ys);
    c.n = xs.size();
    c.p_value = spearman_p(xs, ys);
    c.significant_at_1pct = significance_at(0.01, c.p_value);
    return c;
}

} // namespace chessprob::stats
