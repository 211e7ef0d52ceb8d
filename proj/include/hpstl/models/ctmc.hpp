#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hpstl/error.hpp"
#include "hpstl/models/model.hpp"
#include "hpstl/models/random.hpp"

namespace hpstl::models {

struct CtmcConfig {
    std::vector<std::vector<double>> rates;        // generator matrix M, rows sum to 0
    std::size_t initial = 0;
    std::vector<std::string> state_names;          // default s0, s1, ...
    std::vector<std::vector<std::string>> labels;  // per state; default {state name}
};

/// Continuous-time Markov chain simulated with the Gillespie algorithm.
class CtmcModel final : public PusModel {
public:
    static constexpr double kRowSumTolerance = 1e-9;

    explicit CtmcModel(CtmcConfig cfg) : cfg_(std::move(cfg)) {
        const std::size_t n = cfg_.rates.size();
        if (n == 0) throw InvalidRateMatrix("rate matrix is empty");
        for (std::size_t i = 0; i < n; ++i) {
            const auto& row = cfg_.rates[i];
            if (row.size() != n) throw InvalidRateMatrix("rate matrix must be square");
            double sum = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                if (!std::isfinite(row[j])) throw InvalidRateMatrix("rate matrix entries must be finite");
                if (i != j && row[j] < 0.0) {
                    throw InvalidRateMatrix("negative off-diagonal rate in row " + std::to_string(i));
                }
                sum += row[j];
            }
            if (std::fabs(sum) > kRowSumTolerance) {
                throw InvalidRateMatrix("row " + std::to_string(i) + " sums to " + std::to_string(sum) + ", not 0");
            }
        }
        if (cfg_.initial >= n) throw InvalidRateMatrix("initial state out of range");
        if (cfg_.state_names.empty()) {
            for (std::size_t i = 0; i < n; ++i) cfg_.state_names.push_back("s" + std::to_string(i));
        }
        if (cfg_.state_names.size() != n) throw ConfigError("state name count does not match the rate matrix");
        if (cfg_.labels.empty()) {
            for (std::size_t i = 0; i < n; ++i) cfg_.labels.push_back({cfg_.state_names[i]});
        }
        if (cfg_.labels.size() != n) throw ConfigError("label list count does not match the rate matrix");

        std::vector<std::string> names;
        for (const auto& ls : cfg_.labels) {
            for (const auto& l : ls) {
                if (std::find(names.begin(), names.end(), l) == names.end()) names.push_back(l);
            }
        }
        if (names.size() > Trace::kMaxLabels) throw ConfigError("at most 64 distinct labels are supported");
        masks_.assign(n, 0);
        for (std::size_t i = 0; i < n; ++i) {
            for (const auto& l : cfg_.labels[i]) {
                const auto k = static_cast<std::size_t>(std::find(names.begin(), names.end(), l) - names.begin());
                masks_[i] |= std::uint64_t{1} << k;
            }
        }
        labels_ = semantics::make_names(std::move(names));
        values_ = semantics::make_names({"state"});

        exit_.assign(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (j != i) exit_[i] += cfg_.rates[i][j];
            }
        }
    }

    const CtmcConfig& config() const { return cfg_; }
    double exit_rate(std::size_t s) const { return exit_[s]; }

    Trace sample(std::uint64_t seed, double horizon) const override {
        Rng rng(seed);
        Trace tr(semantics::TraceKind::Event, labels_, values_, horizon);
        std::size_t s = cfg_.initial;
        double t = 0.0;
        while (t < horizon) {
            const double v = static_cast<double>(s);
            tr.push(t, masks_[s], static_cast<std::int64_t>(s), {&v, 1});
            if (exit_[s] == 0.0) {
                tr.set_persists(true);
                break;
            }
            t += hold_time(rng, s);
            s = next_state(rng, s);
        }
        return tr;
    }

    /// One holding period from s: (duration, successor). Exposed for statistics tests.
    std::pair<double, std::size_t> step(Rng& rng, std::size_t s) const {
        const double h = hold_time(rng, s);
        return {h, next_state(rng, s)};
    }

    const NameList& labels() const override { return labels_; }
    std::string kind() const override { return "ctmc"; }
    std::optional<std::size_t> state_count() const override { return cfg_.rates.size(); }
    std::vector<std::size_t> initial_states() const override { return {cfg_.initial}; }
    std::string state_name(std::size_t s) const override { return cfg_.state_names.at(s); }

    std::shared_ptr<const PusModel> start_from(std::size_t state) const override {
        if (state >= cfg_.rates.size()) throw DomainError("state index out of range");
        CtmcConfig c = cfg_;
        c.initial = state;
        return std::make_shared<CtmcModel>(std::move(c));
    }

private:
    double hold_time(Rng& rng, std::size_t s) const { return -std::log(1.0 - rng.uniform()) / exit_[s]; }

    std::size_t next_state(Rng& rng, std::size_t s) const {
        const auto& row = cfg_.rates[s];
        const double u = rng.uniform();
        double acc = 0.0;
        std::size_t last = s;
        for (std::size_t j = 0; j < row.size(); ++j) {
            if (j == s || row[j] <= 0.0) continue;
            acc += row[j] / exit_[s];
            last = j;
            if (u < acc) return j;
        }
        return last; // rounding left u just above the final cumulative sum
    }

    CtmcConfig cfg_;
    NameList labels_;
    NameList values_;
    std::vector<std::uint64_t> masks_;
    std::vector<double> exit_;
};

/// The three-state chain used in the Example 1 fixtures (s0 <-> s1 <-> s2).
inline CtmcConfig example1_chain(std::size_t initial = 1) {
    CtmcConfig c;
    c.rates = {{-1.0, 1.0, 0.0}, {2.0, -3.0, 1.0}, {0.0, 2.0, -2.0}};
    c.initial = initial;
    return c;
}

} // namespace hpstl::models
