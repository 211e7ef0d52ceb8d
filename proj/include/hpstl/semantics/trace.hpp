#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "hpstl/error.hpp"
#include "hpstl/logic/printer.hpp"

namespace hpstl::semantics {

enum class TraceKind { Event, Grid };

using NameList = std::shared_ptr<const std::vector<std::string>>;

inline NameList make_names(std::vector<std::string> names) {
    return std::make_shared<const std::vector<std::string>>(std::move(names));
}

/// One sampled path as a right-continuous piecewise-constant signal. Segment i
/// covers [time(i), time(i+1)); the last one runs to the horizon, or forever
/// when the path is known to stay put (absorbing state).
class Trace {
public:
    static constexpr std::size_t kMaxLabels = 64;

    Trace(TraceKind kind, NameList labels, NameList values, double horizon, double dt = 0.0)
        : kind_(kind), labels_(std::move(labels)), values_(std::move(values)), horizon_(horizon), dt_(dt) {
        if (!labels_) labels_ = make_names({});
        if (!values_) values_ = make_names({});
        if (labels_->size() > kMaxLabels) throw ModelError("at most 64 labels per model are supported");
        if (!(horizon > 0.0)) throw DomainError("trace horizon must be positive");
        if (kind == TraceKind::Grid && !(dt > 0.0)) throw DomainError("grid traces need a positive step");
    }

    /// Appends a segment. Times must start at 0 and increase strictly.
    void push(double t, std::uint64_t mask, std::int64_t state = -1, std::span<const double> values = {}) {
        if (times_.empty() ? t != 0.0 : !(t > times_.back())) {
            throw DomainError("trace segment times must start at 0 and strictly increase");
        }
        if (!(t < horizon_)) throw DomainError("trace segment starts at or past the horizon");
        if (values.size() != values_->size()) throw DomainError("trace segment value count mismatch");
        times_.push_back(t);
        masks_.push_back(mask);
        states_.push_back(state);
        data_.insert(data_.end(), values.begin(), values.end());
    }

    TraceKind kind() const { return kind_; }
    double horizon() const { return horizon_; }
    double dt() const { return dt_; }
    bool persists() const { return persists_; }
    void set_persists(bool p) { persists_ = p; }

    std::size_t size() const { return times_.size(); }
    bool empty() const { return times_.empty(); }
    double time(std::size_t i) const { return times_[i]; }
    std::uint64_t mask(std::size_t i) const { return masks_[i]; }
    std::int64_t state(std::size_t i) const { return states_[i]; }
    double value(std::size_t i, std::size_t k) const { return data_[i * values_->size() + k]; }
    std::span<const double> times() const { return times_; }

    const std::vector<std::string>& label_names() const { return *labels_; }
    const std::vector<std::string>& value_names() const { return *values_; }
    const NameList& label_list() const { return labels_; }

    std::optional<std::size_t> label_index(const std::string& name) const {
        const auto it = std::find(labels_->begin(), labels_->end(), name);
        if (it == labels_->end()) return std::nullopt;
        return static_cast<std::size_t>(it - labels_->begin());
    }

    /// Whether time t is observed on this trace.
    bool observed(double t) const { return t < horizon_ || persists_; }

    /// Segment active at time t >= 0 (the last one for t past the end).
    std::size_t segment_at(double t) const {
        const auto it = std::upper_bound(times_.begin(), times_.end(), t);
        return it == times_.begin() ? 0 : static_cast<std::size_t>(it - times_.begin()) - 1;
    }

    bool has(std::size_t label, double t) const { return (masks_[segment_at(t)] >> label) & 1u; }

    /// `t=<s> labels={..} values={k:v,..}` per segment.
    std::string dump() const {
        std::ostringstream out;
        for (std::size_t i = 0; i < size(); ++i) {
            out << "t=" << logic::format_number(times_[i]) << " labels={";
            bool first = true;
            for (std::size_t l = 0; l < labels_->size(); ++l) {
                if ((masks_[i] >> l) & 1u) {
                    out << (first ? "" : ",") << (*labels_)[l];
                    first = false;
                }
            }
            out << "} values={";
            for (std::size_t k = 0; k < values_->size(); ++k) {
                out << (k ? "," : "") << (*values_)[k] << ":" << logic::format_number(value(i, k));
            }
            out << "}\n";
        }
        return out.str();
    }

private:
    TraceKind kind_;
    NameList labels_;
    NameList values_;
    double horizon_;
    double dt_;
    bool persists_ = false;
    std::vector<double> times_;
    std::vector<std::uint64_t> masks_;
    std::vector<std::int64_t> states_;
    std::vector<double> data_;
};

} // namespace hpstl::semantics
