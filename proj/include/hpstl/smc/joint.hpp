#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "hpstl/logic/region_compiler.hpp"
#include "hpstl/models/model.hpp"
#include "hpstl/smc/sampling.hpp"
#include "hpstl/smc/types.hpp"
#include "hpstl/stats/clopper_pearson.hpp"
#include "hpstl/stats/region.hpp"

namespace hpstl::smc {

/// Incremental state of a joint-region test (p_1, ..., p_n) in D. Kept as an
/// object so nested engines can pause a run and resume it at a smaller level.
/// Tuple k of operator i uses seed derive_seed(seed_base, i, k).
class JointRun {
public:
    JointRun(models::ModelPtr model, logic::CompiledRegion compiled, const SmcConfig& cfg, std::uint64_t seed_base,
             FixedPaths fixed = {})
        : region_(std::move(compiled.region)), complement_(region_.complement()), batch_(cfg.batch),
          seed_base_(seed_base), record_(cfg.record_iterations) {
        for (const auto& leaf : compiled.leaves) {
            samplers_.emplace_back(model, std::get<logic::Prob>(leaf->node), cfg, fixed);
        }
        counts_.resize(samplers_.size());
    }

    /// Draws B tuples for every operator and re-evaluates the assertion.
    void iterate() {
        for (std::size_t i = 0; i < samplers_.size(); ++i) {
            auto& c = counts_[i];
            for (std::uint64_t b = 0; b < batch_; ++b, ++c.trials) {
                if (samplers_[i].draw(models::derive_seed(seed_base_, i, c.trials))) ++c.successes;
            }
        }
        update();
        if (record_) {
            IterationRecord rec;
            for (const auto& c : counts_) {
                rec.trials.push_back(c.trials);
                rec.successes.push_back(c.successes);
            }
            rec.significance = significance_;
            rec.assertion = assertion_;
            log_.push_back(std::move(rec));
        }
    }

    /// Iterates until the assertion holds at level `target` or `cap` tuples per
    /// operator are used. Returns whether it is decided.
    bool run_until(double target, std::uint64_t cap) {
        while (!decided(target)) {
            if (!counts_.empty() && counts_[0].trials >= cap) return false;
            iterate();
        }
        return true;
    }

    bool decided(double target) const { return assertion_ != Assertion::Undecided && significance_ <= target; }
    bool started() const { return !counts_.empty() && counts_[0].trials > 0; }

    Assertion assertion() const { return assertion_; }
    double significance() const { return significance_; }
    const std::vector<stats::CountStat>& counts() const { return counts_; }
    const std::vector<IterationRecord>& log() const { return log_; }

    std::uint64_t total_samples() const {
        std::uint64_t n = 0;
        for (const auto& c : counts_) n += c.trials;
        return n;
    }
    std::uint64_t truncated() const {
        std::uint64_t n = 0;
        for (const auto& s : samplers_) n += s.truncated();
        return n;
    }

private:
    void update() {
        std::vector<double> point;
        for (const auto& c : counts_) point.push_back(c.ratio());
        const bool inside = region_.contains(point);
        const auto box = stats::largest_box(point, inside ? region_ : complement_);
        if (!box) {
            // On the boundary of D: no evidence either way yet.
            assertion_ = Assertion::Undecided;
            significance_ = 1.0;
            return;
        }
        assertion_ = inside ? Assertion::True : Assertion::False;
        significance_ = stats::joint_significance(*box, counts_);
    }

    stats::Region region_;
    stats::Region complement_;
    std::uint64_t batch_;
    std::uint64_t seed_base_;
    bool record_;
    std::vector<LeafSampler> samplers_;
    std::vector<stats::CountStat> counts_;
    Assertion assertion_ = Assertion::Undecided;
    double significance_ = 1.0;
    std::vector<IterationRecord> log_;
};

/// Joint-region test of a closed state formula compiled to (p_1..p_n) in D.
inline Verdict verify_joint(const models::ModelPtr& model, const logic::CompiledRegion& compiled,
                            const SmcConfig& cfg) {
    cfg.validate();
    const Stopwatch clock;
    JointRun run(model, compiled, cfg, cfg.seed);
    Verdict v;
    v.algorithm = logic::AlgorithmKind::Joint;
    const bool ok = run.run_until(cfg.alpha, cfg.max_samples);
    v.assertion = ok ? run.assertion() : Assertion::Undecided;
    v.significance = run.significance();
    for (const auto& c : run.counts()) v.samples.push_back(c.trials);
    v.total_samples = run.total_samples();
    v.truncated = run.truncated();
    v.iterations = run.log();
    v.wall_time = clock.seconds();
    return v;
}

} // namespace hpstl::smc
