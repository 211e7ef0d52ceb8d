#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <vector>

#include "hpstl/error.hpp"
#include "hpstl/logic/analysis.hpp"
#include "hpstl/logic/region_compiler.hpp"
#include "hpstl/models/model.hpp"
#include "hpstl/smc/joint.hpp"
#include "hpstl/smc/types.hpp"
#include "hpstl/stats/clopper_pearson.hpp"

namespace hpstl::smc {

/// Outcome of one outer iteration of the nested-path test.
struct NestedPathStep {
    Assertion assertion = Assertion::Undecided;
    double significance = 1.0; // alpha2 plus the CP term, or 1 when undecided
    double alpha2 = 1.0;
};

/// Combines the inner assertion count A over N outer tuples into an outer
/// assertion, allowing |T - A| <= Delta misclassified inner assertions.
/// `unknown` inner runs have not decided yet and may count either way.
inline NestedPathStep nested_path_step(std::uint64_t A, std::uint64_t N, std::uint64_t delta, double alpha1,
                                       const logic::SimpleShape& outer, std::uint64_t unknown = 0) {
    NestedPathStep s;
    s.alpha2 = stats::binom_sf(static_cast<std::int64_t>(delta), N, alpha1);
    const std::uint64_t t_lo = A > delta ? A - delta : 0;
    const std::uint64_t t_hi = std::min(A + unknown + delta, N);
    const double n = static_cast<double>(N);
    const double p = outer.threshold;
    const bool below = static_cast<double>(t_hi) / n < p; // every consistent T gives ratio < p
    const bool above = static_cast<double>(t_lo) / n > p;
    if (below) {
        s.assertion = outer.less ? Assertion::True : Assertion::False;
        s.significance = std::min(1.0, s.alpha2 + stats::cp_significance(0.0, p, t_hi, N));
    } else if (above) {
        s.assertion = outer.less ? Assertion::False : Assertion::True;
        s.significance = std::min(1.0, s.alpha2 + stats::cp_significance(p, 1.0, t_lo, N));
    }
    return s;
}

/// P^Pi1( state formula over P^Pi2 operators ) compared with p1. One outer
/// tuple is added per iteration; each keeps its own inner joint test, which
/// is resumed (keeping its samples) whenever the inner level alpha1 shrinks.
/// An inner test gets a bounded number of tuples per outer iteration; one
/// that is still open is counted as unknown instead of stalling the outer
/// test (an outer tuple whose inner probability sits on the boundary would
/// otherwise never let it finish).
/// Tuples per operator (in batches) an inner test may draw per outer iteration.
inline constexpr std::uint64_t kInnerStepBatches = 100;

inline Verdict verify_nested_path(const models::ModelPtr& model, const logic::NestedPathShape& shape,
                                  const SmcConfig& cfg) {
    cfg.validate();
    const Stopwatch clock;
    if (!(shape.outer.threshold >= 0.0 && shape.outer.threshold <= 1.0)) {
        throw DomainError("probability threshold must lie in [0,1]");
    }
    const auto compiled = logic::compile_region(*shape.inner, cfg.regions);
    SmcConfig inner_cfg = cfg;
    inner_cfg.record_iterations = false;

    Verdict v;
    v.algorithm = logic::AlgorithmKind::NestedPath;
    std::vector<JointRun> inner;
    double alpha1 = cfg.alpha;
    std::uint64_t c = 1;
    std::uint64_t N = 0;
    std::uint64_t inner_total = 0;

    auto finish = [&](Assertion a, double sig) {
        v.assertion = a;
        v.significance = sig;
        v.samples = {N};
        v.total_samples = N + inner_total;
        v.truncated = 0;
        for (const auto& r : inner) v.truncated += r.truncated();
        v.wall_time = clock.seconds();
        return v;
    };

    while (true) {
        auto traces = std::make_shared<const std::vector<semantics::Trace>>(
            models::sample_tuple(*model, shape.outer_vars.size(), models::derive_seed(cfg.seed, 0, N), cfg.horizon));
        inner.emplace_back(model, compiled, inner_cfg, models::derive_seed(cfg.seed, 1, N),
                           FixedPaths{shape.outer_vars, std::move(traces)});
        ++N;

        std::uint64_t A = 0;
        std::uint64_t unknown = 0;
        std::uint64_t used = 0;
        for (const auto& run : inner) used += run.total_samples();
        for (auto& run : inner) {
            const std::uint64_t ops = std::max<std::size_t>(1, run.counts().size());
            const std::uint64_t before = run.total_samples();
            const std::uint64_t spent = N + used;
            const std::uint64_t budget = cfg.max_samples > spent ? cfg.max_samples - spent : 0;
            // Per-operator cap: this iteration's step, and never past the global budget.
            const std::uint64_t cap = before / ops + std::min(budget / ops, kInnerStepBatches * cfg.batch);
            const bool ok = run.run_until(alpha1, cap);
            used += run.total_samples() - before;
            if (!ok) {
                ++unknown;
            } else if (run.assertion() == Assertion::True) {
                ++A;
            }
        }
        inner_total = used;

        const auto delta = static_cast<std::uint64_t>(std::ceil(static_cast<double>(c) * alpha1 * static_cast<double>(N)));
        const auto step = nested_path_step(A, N, delta, alpha1, shape.outer, unknown);
        if (cfg.record_iterations) {
            // Logged as trials {N, inner tuples} and successes {A, Delta}.
            v.iterations.push_back({{N, inner_total}, {A, delta}, step.significance, step.assertion});
        }
        if (step.assertion != Assertion::Undecided && step.significance <= cfg.alpha) {
            return finish(step.assertion, step.significance);
        }
        if (N + inner_total >= cfg.max_samples) return finish(Assertion::Undecided, step.significance);
        if (step.alpha2 > step.significance / 2.0) {
            ++c;
        } else {
            alpha1 /= 2.0;
        }
    }
}

} // namespace hpstl::smc
