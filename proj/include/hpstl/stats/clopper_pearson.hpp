#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>

#include "hpstl/error.hpp"
#include "hpstl/stats/beta.hpp"

namespace hpstl::stats {

/// Success count T out of N Bernoulli trials.
struct CountStat {
    std::uint64_t successes = 0;
    std::uint64_t trials = 0;

    double ratio() const { return static_cast<double>(successes) / static_cast<double>(trials); }
    friend bool operator==(const CountStat&, const CountStat&) = default;
};

/// Closed interval [lo, hi] of probabilities.
struct Interval {
    double lo = 0.0;
    double hi = 1.0;

    bool contains(double x) const { return lo <= x && x <= hi; }
    double width() const { return hi - lo; }
    friend bool operator==(const Interval&, const Interval&) = default;
};

/// Clopper-Pearson significance of the claim p in [a, b] after observing
/// T successes in N trials. Evaluated as the sum of the two exact tails so
/// that very small levels keep full relative precision.
inline double cp_significance(double a, double b, std::uint64_t T, std::uint64_t N) {
    if (N == 0) throw DomainError("cp_significance requires N >= 1");
    if (T > N) throw DomainError("cp_significance requires T <= N");
    if (!(a >= 0.0 && a <= b && b <= 1.0)) {
        throw DomainError("cp_significance requires 0 <= a <= b <= 1");
    }
    const double n = static_cast<double>(N);
    const double t = static_cast<double>(T);

    // Mass of the confidence distribution below a.
    double lower = 0.0;
    if (a > 0.0) {
        if (T == 0) {
            lower = -std::expm1(n * std::log1p(-a));
        } else if (T == N) {
            lower = std::pow(a, n);
        } else {
            lower = reg_inc_beta(a, t, n - t + 1.0);
        }
    }

    // Mass above b.
    double upper = 0.0;
    if (b < 1.0) {
        if (T == N) {
            upper = -std::expm1(n * std::log(b));
        } else if (T == 0) {
            upper = std::pow(1.0 - b, n);
        } else {
            upper = reg_inc_beta_complement(b, t + 1.0, n - t);
        }
    }
    return std::clamp(lower + upper, 0.0, 1.0);
}

struct ThresholdAssertion {
    bool assertion = false;
    double significance = 1.0;
};

/// Assertion "p_phi < p" from T/N and its significance over [0,p] or [p,1].
/// T/N == p carries no evidence: assertion false with significance 1. At
/// p = 0 or 1 a single contrary sample settles the claim exactly.
inline ThresholdAssertion cp_for_threshold(std::uint64_t T, std::uint64_t N, double p) {
    if (N == 0) throw DomainError("cp_for_threshold requires N >= 1");
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("threshold must lie in [0, 1]");
    const double ratio = static_cast<double>(T) / static_cast<double>(N);
    if (ratio < p) return {true, cp_significance(0.0, p, T, N)};
    if (ratio > p) return {false, cp_significance(p, 1.0, T, N)};
    return {false, 1.0};
}

/// Upper bound on the significance of a box claim, composing independent
/// per-coordinate levels: 1 - prod(1 - alpha_i).
inline double joint_significance(std::span<const Interval> box, std::span<const CountStat> counts) {
    if (box.size() != counts.size()) {
        throw DomainError("joint_significance: box and count dimensions differ");
    }
    double log_confidence = 0.0;
    for (std::size_t i = 0; i < box.size(); ++i) {
        const double alpha = cp_significance(box[i].lo, box[i].hi, counts[i].successes, counts[i].trials);
        log_confidence += std::log1p(-alpha);
    }
    return std::clamp(-std::expm1(log_confidence), 0.0, 1.0);
}

/// P[X <= k] for X ~ Binom(n, p).
inline double binom_cdf(std::int64_t k, std::uint64_t n, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binom_cdf requires p in [0, 1]");
    if (k < 0) return 0.0;
    if (static_cast<std::uint64_t>(k) >= n) return 1.0;
    if (p == 0.0) return 1.0;
    if (p == 1.0) return 0.0;
    if (n <= 50) {
        // Binomial coefficients are exact doubles here, so dyadic p sums exactly.
        double coef = 1.0;
        double sum = 0.0;
        for (std::uint64_t i = 0; i <= static_cast<std::uint64_t>(k); ++i) {
            sum += coef * std::pow(p, static_cast<double>(i)) * std::pow(1.0 - p, static_cast<double>(n - i));
            coef = coef * static_cast<double>(n - i) / static_cast<double>(i + 1);
        }
        return std::min(sum, 1.0);
    }
    const double kk = static_cast<double>(k);
    return reg_inc_beta(1.0 - p, static_cast<double>(n) - kk, kk + 1.0);
}

/// P[X > k] for X ~ Binom(n, p), accurate when tiny.
inline double binom_sf(std::int64_t k, std::uint64_t n, double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw DomainError("binom_sf requires p in [0, 1]");
    if (k < 0) return 1.0;
    if (static_cast<std::uint64_t>(k) >= n) return 0.0;
    if (p == 0.0) return 0.0;
    if (p == 1.0) return 1.0;
    const double kk = static_cast<double>(k);
    return reg_inc_beta(p, kk + 1.0, static_cast<double>(n) - kk);
}

} // namespace hpstl::stats
