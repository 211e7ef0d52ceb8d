#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "hpstl/error.hpp"
#include "hpstl/logic/formula.hpp"
#include "hpstl/models/model.hpp"
#include "hpstl/semantics/evaluator.hpp"
#include "hpstl/smc/types.hpp"

namespace hpstl::smc {

/// Paths already bound by an enclosing operator (the outer tuple in nested
/// path formulas).
struct FixedPaths {
    std::vector<std::string> vars;
    std::shared_ptr<const std::vector<semantics::Trace>> traces;
};

/// Draws fresh tuples for one P^Pi(phi) and evaluates phi on them.
class LeafSampler {
public:
    LeafSampler(models::ModelPtr model, const logic::Prob& leaf, const SmcConfig& cfg, FixedPaths fixed = {})
        : model_(std::move(model)), horizon_(cfg.horizon), policy_(cfg.truncation), fixed_(std::move(fixed)),
          arity_(leaf.pathvars.size()),
          evaluator_(*leaf.body, concat(fixed_.vars, leaf.pathvars), *model_->labels()) {
        if (fixed_.traces && fixed_.traces->size() != fixed_.vars.size()) {
            throw DomainError("fixed path bindings have mismatched sizes");
        }
        ptrs_.resize(fixed_.vars.size() + arity_);
        for (std::size_t i = 0; i < fixed_.vars.size(); ++i) ptrs_[i] = &(*fixed_.traces)[i];
    }

    /// phi on the tuple derived from `tuple_seed`, after the truncation policy.
    bool draw(std::uint64_t tuple_seed) {
        const auto tuple = models::sample_tuple(*model_, arity_, tuple_seed, horizon_);
        for (std::size_t i = 0; i < arity_; ++i) ptrs_[fixed_.vars.size() + i] = &tuple[i];
        const auto r = evaluator_.eval(ptrs_, 0.0);
        if (r == semantics::Truth::Unknown) {
            ++truncated_;
            if (policy_ == TruncationPolicy::CountError) {
                throw HorizonExceeded("a sample's truth value depends on the path past horizon " +
                                      std::to_string(horizon_) + "; raise --horizon or use count-false");
            }
            return false;
        }
        return r == semantics::Truth::True;
    }

    std::uint64_t truncated() const { return truncated_; }

    /// The tuple behind `tuple_seed`, without evaluating (for trace dumps).
    std::vector<semantics::Trace> sample_only(std::uint64_t tuple_seed) const {
        return models::sample_tuple(*model_, arity_, tuple_seed, horizon_);
    }

private:
    static std::vector<std::string> concat(const std::vector<std::string>& a, const std::vector<std::string>& b) {
        std::vector<std::string> out = a;
        for (const auto& v : b) {
            for (const auto& u : a) {
                if (u == v) throw UnsupportedShape("path variable '" + v + "' is bound twice");
            }
            out.push_back(v);
        }
        return out;
    }

    models::ModelPtr model_;
    double horizon_;
    TruncationPolicy policy_;
    FixedPaths fixed_;
    std::size_t arity_;
    semantics::PathEvaluator evaluator_;
    std::vector<const semantics::Trace*> ptrs_;
    std::uint64_t truncated_ = 0;
};

} // namespace hpstl::smc
