#pragma once

// Independent reference implementations used by tests.

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <utility>
#include <string>
#include <vector>

#include "hpstl/logic/formula.hpp"
#include "hpstl/models/random.hpp"
#include "hpstl/semantics/evaluator.hpp"
#include "hpstl/semantics/trace.hpp"

namespace oracle {

using namespace hpstl;

inline double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
               double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
    return simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a, double b, double tol) {
    const double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
    return simpson(f, a, b, fa, fm, fb, (b - a) / 6.0 * (fa + 4.0 * fm + fb), tol, 50);
}

// I_x(a,b) by quadrature of the normalized Beta density. For a < 1 the
// substitution u = t^a removes the t^(a-1) singularity; the upper tail uses
// the reflection so that (1-t)^(b-1) stays away from its singularity.
inline double beta_by_quadrature(double x, double a, double b) {
    if (x > 0.5) return 1.0 - beta_by_quadrature(1.0 - x, b, a);
    if (x == 0.0) return 0.0;
    const double log_beta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    if (a < 1.0) {
        const auto g = [a, b, log_beta](double u) {
            return std::exp((b - 1.0) * std::log1p(-std::pow(u, 1.0 / a)) - log_beta) / a;
        };
        return integrate(g, 0.0, std::pow(x, a), 1e-13);
    }
    const auto g = [a, b, log_beta](double t) {
        if (t == 0.0) return a == 1.0 ? std::exp(-log_beta) : 0.0;
        return std::exp((a - 1.0) * std::log(t) + (b - 1.0) * std::log1p(-t) - log_beta);
    };
    return integrate(g, 0.0, x, 1e-13);
}

using semantics::Truth;

// Direct transliteration of the until rule on a grid: some witness w in
// [t+lo, t+hi] satisfies the right side and every grid time in [t, w)
// satisfies the left side. Times at or past the horizon are all alike, so
// witnesses are capped there. Results are memoized per subformula and grid time.
struct GridOracle {
    const std::vector<const semantics::Trace*>& traces;
    const std::vector<std::string>& order;
    double dt;
    double horizon;
    mutable std::map<std::pair<const logic::Formula*, long long>, Truth> memo = {};

    Truth eval(const logic::Formula& f, double t) const {
        const auto key = std::make_pair(&f, std::llround(t / dt));
        if (const auto it = memo.find(key); it != memo.end()) return it->second;
        const Truth r = eval_uncached(f, t);
        memo.emplace(key, r);
        return r;
    }

    Truth eval_uncached(const logic::Formula& f, double t) const {
        if (std::holds_alternative<logic::True>(f.node)) return Truth::True;
        if (const auto* a = std::get_if<logic::Atom>(&f.node)) {
            std::size_t v = 0;
            while (order[v] != a->pathvar) ++v;
            if (t >= horizon) return Truth::Unknown;
            const auto& tr = *traces[v];
            const auto k = static_cast<std::size_t>(std::llround(t / dt));
            return ((tr.mask(k) >> *tr.label_index(a->label)) & 1u) ? Truth::True : Truth::False;
        }
        if (const auto* n = std::get_if<logic::Not>(&f.node)) return semantics::truth_not(eval(*n->child, t));
        if (const auto* n = std::get_if<logic::And>(&f.node)) {
            return semantics::truth_and(eval(*n->left, t), eval(*n->right, t));
        }
        const auto& u = std::get<logic::Until>(f.node);
        const auto k0 = std::llround(t / dt);
        const auto lo = std::llround(u.lo / dt);
        const auto cap = std::llround(horizon / dt);
        // An unbounded window reaches the horizon from any start.
        const long long hi = std::isfinite(u.hi) ? std::llround(u.hi / dt) : lo + cap + 1;
        Truth any = Truth::False;
        for (long long w = k0 + lo; w <= k0 + hi; ++w) {
            const long long wc = std::min(w, cap);
            Truth all = Truth::True;
            for (long long s = k0; s < w; ++s) {
                all = semantics::truth_and(all, eval(*u.left, static_cast<double>(std::min(s, cap)) * dt));
            }
            any = semantics::truth_or(any, semantics::truth_and(all, eval(*u.right, static_cast<double>(wc) * dt)));
            if (w >= cap) break;
        }
        return any;
    }
};

inline logic::FormulaPtr random_path(models::Rng& rng, int depth, const std::vector<std::string>& vars,
                              const std::vector<std::string>& labels) {
    const auto pick = [&rng](std::size_t n) { return static_cast<std::size_t>(rng.uniform() * static_cast<double>(n)); };
    if (depth == 0 || rng.uniform() < 0.25) {
        if (rng.uniform() < 0.05) return logic::top();
        return logic::atom(labels[pick(labels.size())], vars[pick(vars.size())]);
    }
    const double r = rng.uniform();
    if (r < 0.25) return logic::negate(random_path(rng, depth - 1, vars, labels));
    if (r < 0.5) {
        return logic::conj(random_path(rng, depth - 1, vars, labels), random_path(rng, depth - 1, vars, labels));
    }
    const double lo = 0.25 * static_cast<double>(pick(8));
    const double hi = rng.uniform() < 0.3 ? std::numeric_limits<double>::infinity()
                                          : lo + 0.25 * static_cast<double>(1 + pick(12));
    return logic::until(random_path(rng, depth - 1, vars, labels), random_path(rng, depth - 1, vars, labels), lo, hi);
}

// Grid trace with `points` samples of random label masks over `names`.
inline semantics::Trace random_grid_trace(models::Rng& rng, const semantics::NameList& names, std::size_t points,
                                          double dt) {
    semantics::Trace t(semantics::TraceKind::Grid, names, semantics::make_names({}),
                       static_cast<double>(points) * dt, dt);
    const auto masks = static_cast<double>(std::uint64_t{1} << names->size());
    for (std::size_t k = 0; k < points; ++k) {
        t.push(static_cast<double>(k) * dt, static_cast<std::uint64_t>(rng.uniform() * masks), -1, {});
    }
    return t;
}

} // namespace oracle
