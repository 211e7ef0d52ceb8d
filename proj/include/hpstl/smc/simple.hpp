#pragma once

#include <cstdint>

#include "hpstl/logic/analysis.hpp"
#include "hpstl/models/model.hpp"
#include "hpstl/smc/sampling.hpp"
#include "hpstl/smc/types.hpp"
#include "hpstl/stats/clopper_pearson.hpp"

namespace hpstl::smc {

/// Sequential Clopper-Pearson test of P^Pi(phi) < p (or > p): B tuples per
/// iteration until the significance of the current assertion reaches alpha.
/// Tuple n uses seed derive_seed(cfg.seed, 0, n).
inline Verdict verify_simple(const models::ModelPtr& model, const logic::SimpleShape& shape, const SmcConfig& cfg) {
    cfg.validate();
    const Stopwatch clock;
    if (!(shape.threshold >= 0.0 && shape.threshold <= 1.0)) {
        throw DomainError("probability threshold must lie in [0,1]");
    }
    const auto& leaf = std::get<logic::Prob>(shape.leaf->node);
    LeafSampler sampler(model, leaf, cfg);

    Verdict v;
    v.algorithm = logic::AlgorithmKind::Simple;
    std::uint64_t T = 0;
    std::uint64_t N = 0;
    while (true) {
        for (std::uint64_t b = 0; b < cfg.batch; ++b, ++N) {
            if (sampler.draw(models::derive_seed(cfg.seed, 0, N))) ++T;
        }
        const auto cp = stats::cp_for_threshold(T, N, shape.threshold);
        // cp.assertion is "T/N < p"; a `>` claim reads the other branch.
        const double ratio = static_cast<double>(T) / static_cast<double>(N);
        const bool claim = shape.less ? cp.assertion : ratio > shape.threshold;
        v.significance = cp.significance;
        v.assertion = claim ? Assertion::True : Assertion::False;
        if (cfg.record_iterations) {
            v.iterations.push_back({{N}, {T}, cp.significance, v.assertion});
        }
        if (cp.significance <= cfg.alpha) break;
        if (N >= cfg.max_samples) {
            v.assertion = Assertion::Undecided;
            break;
        }
    }
    v.samples = {N};
    v.total_samples = N;
    v.truncated = sampler.truncated();
    v.wall_time = clock.seconds();
    return v;
}

} // namespace hpstl::smc
