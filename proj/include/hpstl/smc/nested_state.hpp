#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hpstl/error.hpp"
#include "hpstl/logic/analysis.hpp"
#include "hpstl/logic/region_compiler.hpp"
#include "hpstl/models/model.hpp"
#include "hpstl/smc/joint.hpp"
#include "hpstl/smc/simple.hpp"
#include "hpstl/smc/types.hpp"

namespace hpstl::smc {

/// Verifies a non-nested closed formula with the simple or joint engine.
inline Verdict verify_flat(const models::ModelPtr& model, const logic::Formula& f, const SmcConfig& cfg) {
    const auto kind = logic::classify(f);
    if (kind == logic::AlgorithmKind::Simple) return verify_simple(model, *logic::match_simple(f), cfg);
    if (kind == logic::AlgorithmKind::Joint) return verify_joint(model, logic::compile_region(f, cfg.regions), cfg);
    throw UnsupportedShape("expected a formula without nesting");
}

/// Label given to states where the i-th embedded formula was asserted. Not a
/// valid identifier, so it cannot clash with model labels.
inline std::string embedded_label(std::size_t i) { return "<rho" + std::to_string(i + 1) + ">"; }

/// Level given to each of the k*|X| inner runs and to the outer run.
inline double nested_state_share(double alpha, std::size_t embedded, std::size_t states) {
    return alpha / static_cast<double>(embedded * states + 1);
}

/// Embedded state formulas are decided state by state, each satisfying state
/// gets a fresh label, and the outer formula runs on the relabeled model.
/// The level is split evenly over k*|X| inner runs and the outer run.
inline Verdict verify_nested_state(const models::ModelPtr& model, const logic::FormulaPtr& f, const SmcConfig& cfg) {
    cfg.validate();
    const Stopwatch clock;
    const auto states = model->state_count();
    if (!states) throw InfiniteStateSpace(model->kind() + " model has an unbounded state space; embedded state "
                                          "formulas need a finite one");
    const auto embedded = logic::embedded_states(*f);
    const double share = nested_state_share(cfg.alpha, embedded.size(), *states);

    Verdict v;
    v.algorithm = logic::AlgorithmKind::NestedState;
    double total_alpha = 0.0;
    models::ModelPtr relabeled = model;
    std::vector<std::string> labels;
    for (std::size_t k = 0; k < embedded.size(); ++k) {
        std::vector<bool> marked(*states, false);
        for (std::size_t x = 0; x < *states; ++x) {
            SmcConfig inner = cfg;
            inner.alpha = share;
            inner.seed = models::derive_seed(cfg.seed, 0x6e657374ULL, k, x);
            inner.record_iterations = false;
            const auto r = verify_flat(model->start_from(x), *embedded[k], inner);
            v.total_samples += r.total_samples;
            v.truncated += r.truncated;
            if (r.assertion == Assertion::Undecided) {
                v.assertion = Assertion::Undecided;
                v.significance = 1.0;
                v.wall_time = clock.seconds();
                return v;
            }
            total_alpha += r.significance;
            marked[x] = r.assertion == Assertion::True;
        }
        labels.push_back(embedded_label(k));
        relabeled = std::make_shared<models::RelabeledModel>(relabeled, labels.back(), std::move(marked));
    }

    const auto outer = logic::substitute_embeds(f, embedded, labels);
    SmcConfig outer_cfg = cfg;
    outer_cfg.alpha = share;
    const auto r = verify_flat(relabeled, *outer, outer_cfg);
    v.assertion = r.assertion;
    v.significance = r.assertion == Assertion::Undecided ? 1.0 : total_alpha + r.significance;
    v.samples = r.samples;
    v.total_samples += r.total_samples;
    v.truncated += r.truncated;
    v.iterations = r.iterations;
    v.wall_time = clock.seconds();
    return v;
}

} // namespace hpstl::smc
