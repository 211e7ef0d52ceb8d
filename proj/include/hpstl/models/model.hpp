#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hpstl/error.hpp"
#include "hpstl/models/random.hpp"
#include "hpstl/semantics/trace.hpp"

namespace hpstl::models {

using semantics::NameList;
using semantics::Trace;

/// A probabilistic uncertain system: a deterministic map from a seed to a path.
class PusModel {
public:
    virtual ~PusModel() = default;

    /// Same (seed, horizon) gives a bit-identical trace.
    virtual Trace sample(std::uint64_t seed, double horizon) const = 0;

    virtual const NameList& labels() const = 0;

    virtual std::string kind() const = 0;

    /// Number of discrete states, or nothing when the state space is unbounded.
    virtual std::optional<std::size_t> state_count() const { return std::nullopt; }

    virtual std::vector<std::size_t> initial_states() const { return {}; }

    virtual std::string state_name(std::size_t s) const { return std::to_string(s); }

    /// The same system started deterministically in state s.
    virtual std::shared_ptr<const PusModel> start_from(std::size_t /*state*/) const {
        throw InfiniteStateSpace(kind() + " model has no enumerable state space");
    }
};

using ModelPtr = std::shared_ptr<const PusModel>;

/// k independent traces; child i uses seed derive_seed(seed, i).
inline std::vector<Trace> sample_tuple(const PusModel& m, std::size_t k, std::uint64_t seed, double horizon) {
    std::vector<Trace> out;
    out.reserve(k);
    for (std::size_t i = 0; i < k; ++i) out.push_back(m.sample(derive_seed(seed, i), horizon));
    return out;
}

/// Adds one label that holds exactly while the path is in a marked state.
class RelabeledModel final : public PusModel {
public:
    RelabeledModel(ModelPtr base, std::string label, std::vector<bool> marked)
        : base_(std::move(base)), label_(std::move(label)), marked_(std::move(marked)) {
        const auto n = base_->state_count();
        if (!n) throw InfiniteStateSpace("cannot relabel a model with an unbounded state space");
        if (marked_.size() != *n) throw DomainError("relabeling needs one flag per state");
        auto names = *base_->labels();
        for (const auto& l : names) {
            if (l == label_) throw DomainError("label '" + label_ + "' already exists");
        }
        bit_ = names.size();
        names.push_back(label_);
        labels_ = semantics::make_names(std::move(names));
        if (labels_->size() > Trace::kMaxLabels) throw ModelError("too many labels after relabeling");
    }

    Trace sample(std::uint64_t seed, double horizon) const override {
        const Trace src = base_->sample(seed, horizon);
        Trace out(src.kind(), labels_, semantics::make_names(src.value_names()), src.horizon(), src.dt());
        out.set_persists(src.persists());
        std::vector<double> vals(src.value_names().size());
        for (std::size_t i = 0; i < src.size(); ++i) {
            const auto s = src.state(i);
            if (s < 0 || static_cast<std::size_t>(s) >= marked_.size()) {
                throw ModelError("trace segment without a valid state index cannot be relabeled");
            }
            for (std::size_t k = 0; k < vals.size(); ++k) vals[k] = src.value(i, k);
            const std::uint64_t extra = marked_[static_cast<std::size_t>(s)] ? (std::uint64_t{1} << bit_) : 0;
            out.push(src.time(i), src.mask(i) | extra, s, vals);
        }
        return out;
    }

    const NameList& labels() const override { return labels_; }
    std::string kind() const override { return base_->kind(); }
    std::optional<std::size_t> state_count() const override { return base_->state_count(); }
    std::vector<std::size_t> initial_states() const override { return base_->initial_states(); }
    std::string state_name(std::size_t s) const override { return base_->state_name(s); }

    std::shared_ptr<const PusModel> start_from(std::size_t state) const override {
        return std::make_shared<RelabeledModel>(base_->start_from(state), label_, marked_);
    }

private:
    ModelPtr base_;
    std::string label_;
    std::vector<bool> marked_;
    NameList labels_;
    std::size_t bit_ = 0;
};

} // namespace hpstl::models
