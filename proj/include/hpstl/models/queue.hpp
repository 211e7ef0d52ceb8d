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

/// Markov-modulated Poisson arrivals. A single mode is a plain Poisson process.
struct ArrivalProcess {
    std::vector<double> rates{1.0};             // arrival rate per modulating mode
    std::vector<std::vector<double>> switching; // mode generator; empty for one mode
    std::size_t initial_mode = 0;

    std::size_t modes() const { return rates.size(); }
};

struct QueueConfig {
    std::vector<ArrivalProcess> arrivals; // one per front server
    std::vector<double> front_service;    // service rate per front server
    std::vector<double> back_service;     // service rate per back server
    std::vector<std::size_t> front_buffer;
    std::vector<std::size_t> back_buffer;
    std::vector<std::size_t> initial_front; // default all empty
    std::vector<std::size_t> initial_back;
};

/// Front servers forward each served request to the back server with the
/// shortest queue (ties to the lowest index); the request is dropped when that
/// queue is full. Label q<i> holds while back queue i is at capacity.
class QueueModel final : public PusModel {
public:
    explicit QueueModel(QueueConfig cfg) : cfg_(std::move(cfg)) {
        const std::size_t n = cfg_.arrivals.size();
        const std::size_t m = cfg_.back_service.size();
        if (n == 0 || m == 0) throw ConfigError("queue network needs at least one front and one back server");
        if (cfg_.front_service.size() != n || cfg_.front_buffer.size() != n) {
            throw ConfigError("front server lists must have one entry per front server");
        }
        if (cfg_.back_buffer.size() != m) throw ConfigError("back buffer list must have one entry per back server");
        if (cfg_.initial_front.empty()) cfg_.initial_front.assign(n, 0);
        if (cfg_.initial_back.empty()) cfg_.initial_back.assign(m, 0);
        if (cfg_.initial_front.size() != n || cfg_.initial_back.size() != m) {
            throw ConfigError("initial queue lengths have the wrong size");
        }
        for (std::size_t i = 0; i < n; ++i) {
            const auto& a = cfg_.arrivals[i];
            if (a.rates.empty()) throw ConfigError("arrival process needs at least one mode");
            for (double r : a.rates) {
                if (!(r >= 0.0) || !std::isfinite(r)) throw ConfigError("arrival rates must be finite and >= 0");
            }
            if (a.initial_mode >= a.modes()) throw ConfigError("initial arrival mode out of range");
            if (a.modes() > 1) {
                if (a.switching.size() != a.modes()) throw ConfigError("MMPP switching matrix has the wrong size");
                for (std::size_t r = 0; r < a.modes(); ++r) {
                    if (a.switching[r].size() != a.modes()) throw ConfigError("MMPP switching matrix must be square");
                    for (std::size_t c = 0; c < a.modes(); ++c) {
                        if (r != c && !(a.switching[r][c] >= 0.0)) {
                            throw ConfigError("MMPP switching rates must be >= 0");
                        }
                    }
                }
            }
            if (!(cfg_.front_service[i] > 0.0)) throw ConfigError("service rates must be positive");
            if (cfg_.front_buffer[i] == 0) throw ConfigError("buffer sizes must be positive");
            if (cfg_.initial_front[i] > cfg_.front_buffer[i]) throw ConfigError("initial front length exceeds buffer");
        }
        for (std::size_t j = 0; j < m; ++j) {
            if (!(cfg_.back_service[j] > 0.0)) throw ConfigError("service rates must be positive");
            if (cfg_.back_buffer[j] == 0) throw ConfigError("buffer sizes must be positive");
            if (cfg_.initial_back[j] > cfg_.back_buffer[j]) throw ConfigError("initial back length exceeds buffer");
        }
        if (m > Trace::kMaxLabels) throw ConfigError("at most 64 back servers are supported");

        std::vector<std::string> labels;
        for (std::size_t j = 0; j < m; ++j) labels.push_back("q" + std::to_string(j + 1));
        labels_ = semantics::make_names(std::move(labels));
        std::vector<std::string> values;
        for (std::size_t i = 0; i < n; ++i) values.push_back("front" + std::to_string(i + 1));
        for (std::size_t j = 0; j < m; ++j) values.push_back("back" + std::to_string(j + 1));
        values.insert(values.end(), {"arrivals", "departures", "drops"});
        values_ = semantics::make_names(std::move(values));

        // Mixed-radix digits: front lengths, back lengths, arrival modes.
        for (std::size_t i = 0; i < n; ++i) radix_.push_back(cfg_.front_buffer[i] + 1);
        for (std::size_t j = 0; j < m; ++j) radix_.push_back(cfg_.back_buffer[j] + 1);
        for (std::size_t i = 0; i < n; ++i) radix_.push_back(cfg_.arrivals[i].modes());
        std::uint64_t total = 1;
        for (auto r : radix_) {
            if (total > (std::uint64_t{1} << 40) / r) throw ConfigError("queue state space too large to enumerate");
            total *= r;
        }
        state_count_ = total;
    }

    const QueueConfig& config() const { return cfg_; }

    Trace sample(std::uint64_t seed, double horizon) const override {
        Rng rng(seed);
        const std::size_t n = cfg_.arrivals.size();
        const std::size_t m = cfg_.back_service.size();
        std::vector<std::size_t> front = cfg_.initial_front;
        std::vector<std::size_t> back = cfg_.initial_back;
        std::vector<std::size_t> mode(n);
        for (std::size_t i = 0; i < n; ++i) mode[i] = cfg_.arrivals[i].initial_mode;
        double arrivals = 0.0, departures = 0.0, drops = 0.0;

        Trace tr(semantics::TraceKind::Event, labels_, values_, horizon);
        std::vector<double> vals(values_->size());
        std::vector<double> rates;
        double t = 0.0;
        while (true) {
            std::uint64_t mask = 0;
            for (std::size_t j = 0; j < m; ++j) {
                if (back[j] == cfg_.back_buffer[j]) mask |= std::uint64_t{1} << j;
            }
            for (std::size_t i = 0; i < n; ++i) vals[i] = static_cast<double>(front[i]);
            for (std::size_t j = 0; j < m; ++j) vals[n + j] = static_cast<double>(back[j]);
            vals[n + m] = arrivals;
            vals[n + m + 1] = departures;
            vals[n + m + 2] = drops;
            tr.push(t, mask, static_cast<std::int64_t>(encode(front, back, mode)), vals);

            // Competing exponential clocks, in a fixed order.
            rates.clear();
            for (std::size_t i = 0; i < n; ++i) rates.push_back(cfg_.arrivals[i].rates[mode[i]]);
            for (std::size_t i = 0; i < n; ++i) rates.push_back(front[i] > 0 ? cfg_.front_service[i] : 0.0);
            for (std::size_t j = 0; j < m; ++j) rates.push_back(back[j] > 0 ? cfg_.back_service[j] : 0.0);
            for (std::size_t i = 0; i < n; ++i) {
                const auto& a = cfg_.arrivals[i];
                for (std::size_t k = 0; k < a.modes(); ++k) {
                    rates.push_back(a.modes() > 1 && k != mode[i] ? a.switching[mode[i]][k] : 0.0);
                }
            }
            double total = 0.0;
            for (double r : rates) total += r;
            if (total == 0.0) {
                tr.set_persists(true);
                break;
            }
            t += -std::log(1.0 - rng.uniform()) / total;
            if (!(t < horizon)) break;
            const double u = rng.uniform() * total;
            std::size_t e = 0;
            double acc = 0.0;
            for (; e + 1 < rates.size(); ++e) {
                acc += rates[e];
                if (u < acc && rates[e] > 0.0) break;
            }
            while (rates[e] == 0.0) --e; // rounding landed past the last live clock

            if (e < n) {
                arrivals += 1.0;
                if (front[e] < cfg_.front_buffer[e]) {
                    ++front[e];
                } else {
                    drops += 1.0;
                }
            } else if (e < 2 * n) {
                const std::size_t i = e - n;
                --front[i];
                std::size_t best = 0;
                for (std::size_t j = 1; j < m; ++j) {
                    if (back[j] < back[best]) best = j;
                }
                if (back[best] < cfg_.back_buffer[best]) {
                    ++back[best];
                } else {
                    drops += 1.0;
                }
            } else if (e < 2 * n + m) {
                --back[e - 2 * n];
                departures += 1.0;
            } else {
                std::size_t k = e - 2 * n - m;
                for (std::size_t i = 0; i < n; ++i) {
                    if (k < cfg_.arrivals[i].modes()) {
                        mode[i] = k;
                        break;
                    }
                    k -= cfg_.arrivals[i].modes();
                }
            }
        }
        return tr;
    }

    const NameList& labels() const override { return labels_; }
    std::string kind() const override { return "queue"; }
    std::optional<std::size_t> state_count() const override { return static_cast<std::size_t>(state_count_); }

    std::vector<std::size_t> initial_states() const override {
        std::vector<std::size_t> mode;
        for (const auto& a : cfg_.arrivals) mode.push_back(a.initial_mode);
        return {encode(cfg_.initial_front, cfg_.initial_back, mode)};
    }

    std::string state_name(std::size_t s) const override {
        const auto d = decode(s);
        std::string out = "(";
        for (std::size_t k = 0; k < d.size(); ++k) out += (k ? "," : "") + std::to_string(d[k]);
        return out + ")";
    }

    std::shared_ptr<const PusModel> start_from(std::size_t state) const override {
        if (state >= state_count_) throw DomainError("state index out of range");
        const auto d = decode(state);
        const std::size_t n = cfg_.arrivals.size();
        const std::size_t m = cfg_.back_service.size();
        QueueConfig c = cfg_;
        for (std::size_t i = 0; i < n; ++i) c.initial_front[i] = d[i];
        for (std::size_t j = 0; j < m; ++j) c.initial_back[j] = d[n + j];
        for (std::size_t i = 0; i < n; ++i) c.arrivals[i].initial_mode = d[n + m + i];
        return std::make_shared<QueueModel>(std::move(c));
    }

private:
    std::size_t encode(const std::vector<std::size_t>& front, const std::vector<std::size_t>& back,
                       const std::vector<std::size_t>& mode) const {
        std::size_t idx = 0;
        std::size_t k = 0;
        for (const auto* part : {&front, &back, &mode}) {
            for (auto v : *part) idx = idx * radix_[k++] + v;
        }
        return idx;
    }

    std::vector<std::size_t> decode(std::size_t idx) const {
        std::vector<std::size_t> d(radix_.size());
        for (std::size_t k = radix_.size(); k-- > 0;) {
            d[k] = idx % radix_[k];
            idx /= radix_[k];
        }
        return d;
    }

    QueueConfig cfg_;
    NameList labels_;
    NameList values_;
    std::vector<std::size_t> radix_;
    std::uint64_t state_count_ = 0;
};

} // namespace hpstl::models
