#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "hpstl/error.hpp"
#include "hpstl/models/model.hpp"
#include "hpstl/models/random.hpp"

namespace hpstl::models {

struct Gaussian {
    double mean = 0.0;
    double std = 1.0;
};
struct Uniform {
    double lo = 0.0;
    double hi = 1.0;
};
struct Constant {
    double value = 0.0;
};
using Distribution = std::variant<Gaussian, Uniform, Constant>;

inline double draw(const Distribution& d, Rng& rng) {
    if (const auto* g = std::get_if<Gaussian>(&d)) return rng.normal(g->mean, g->std);
    if (const auto* u = std::get_if<Uniform>(&d)) return rng.uniform(u->lo, u->hi);
    return std::get<Constant>(d).value;
}

using State = std::vector<double>;
using Params = std::vector<double>;

/// Parametric hybrid automaton: per-mode flows, guarded jumps, predicates.
/// Parameters are drawn once per path and held fixed.
struct HybridSpec {
    std::vector<std::string> modes;
    std::vector<std::string> state_names;
    std::vector<std::string> param_names;
    std::vector<Distribution> param_dists;
    std::size_t initial_mode = 0;
    State initial_state;
    double dt = 0.01;
    std::size_t max_jumps_per_step = 8;

    // dx/dt in the given mode.
    std::function<void(std::size_t mode, const State& x, const Params& p, State& dx)> flow;

    struct Jump {
        std::size_t from = 0;
        std::size_t to = 0;
        std::function<bool(const State&, const Params&)> guard;
        std::function<void(State&, const Params&)> reset; // optional
    };
    std::vector<Jump> jumps;

    struct Predicate {
        std::string name;
        std::function<bool(std::size_t mode, const State&, const Params&)> holds;
    };
    std::vector<Predicate> predicates;
};

class HybridModel final : public PusModel {
public:
    explicit HybridModel(HybridSpec spec) : spec_(std::move(spec)) {
        if (!(spec_.dt > 0.0)) throw ConfigError("integration step dt must be positive");
        if (spec_.modes.empty()) throw ConfigError("hybrid model needs at least one mode");
        if (spec_.initial_mode >= spec_.modes.size()) throw ConfigError("initial mode out of range");
        if (spec_.initial_state.size() != spec_.state_names.size()) throw ConfigError("initial state dimension mismatch");
        if (spec_.param_dists.size() != spec_.param_names.size()) throw ConfigError("parameter list mismatch");
        if (!spec_.flow) throw ConfigError("hybrid model needs a flow");
        if (spec_.predicates.size() > Trace::kMaxLabels) throw ConfigError("at most 64 predicates are supported");
        std::vector<std::string> names;
        for (const auto& p : spec_.predicates) names.push_back(p.name);
        labels_ = semantics::make_names(std::move(names));
        values_ = semantics::make_names(spec_.state_names);
    }

    const HybridSpec& spec() const { return spec_; }

    Params draw_params(std::uint64_t seed) const {
        Rng rng(derive_seed(seed, 0x70617261ULL));
        Params p;
        for (const auto& d : spec_.param_dists) p.push_back(draw(d, rng));
        return p;
    }

    /// Integrates on the dt grid and records a segment at every grid point.
    /// Guard crossings inside a step are located by bisection; the jump is
    /// taken there and an extra segment records the state reaching the guard.
    Trace sample(std::uint64_t seed, double horizon) const override {
        const Params p = draw_params(seed);
        Trace tr(semantics::TraceKind::Grid, labels_, values_, horizon, spec_.dt);
        std::size_t mode = spec_.initial_mode;
        State x = spec_.initial_state;
        State next(x.size());
        State probe(x.size());
        double last = -1.0;
        std::size_t jumps = 0;

        // Labels describe the state as reached, before any jump it enables.
        auto record = [&](double t) {
            for (double v : x) {
                if (!std::isfinite(v)) throw NonfiniteState("hybrid state diverged at t=" + std::to_string(t));
            }
            if (!(t > last)) throw ZenoGuard("guard crossings accumulate at t=" + std::to_string(t));
            std::uint64_t mask = 0;
            for (std::size_t i = 0; i < spec_.predicates.size(); ++i) {
                if (spec_.predicates[i].holds(mode, x, p)) mask |= std::uint64_t{1} << i;
            }
            tr.push(t, mask, static_cast<std::int64_t>(mode), x);
            last = t;
        };
        auto enabled = [&](const State& y) {
            for (const auto& j : spec_.jumps) {
                if (j.from == mode && j.guard(y, p)) return &j;
            }
            return static_cast<const HybridSpec::Jump*>(nullptr);
        };
        auto settle = [&](double t) {
            while (const auto* j = enabled(x)) {
                if (++jumps > spec_.max_jumps_per_step) {
                    throw ZenoGuard("more than " + std::to_string(spec_.max_jumps_per_step) + " jumps at t=" +
                                    std::to_string(t));
                }
                if (j->reset) j->reset(x, p);
                mode = j->to;
            }
        };

        for (std::size_t step = 0;; ++step) {
            const double t = static_cast<double>(step) * spec_.dt;
            if (!(t < horizon)) break;
            jumps = 0;
            record(t);
            settle(t);
            double done = 0.0;
            while (true) {
                rk4(mode, x, spec_.dt - done, p, next);
                if (enabled(next) == nullptr) break;
                // No guard holds at x, one holds after the step: bisect for the crossing.
                double lo = 0.0, hi = spec_.dt - done;
                for (int it = 0; it < 60; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    rk4(mode, x, mid, p, probe);
                    (enabled(probe) != nullptr ? hi : lo) = mid;
                }
                const double te = t + done + hi;
                // A crossing at the next grid point is handled there.
                if (!(te < t + spec_.dt - 1e-9 * spec_.dt) || !(te < horizon)) break;
                rk4(mode, x, hi, p, probe);
                x = probe;
                done += hi;
                record(te);
                settle(te);
            }
            x = next;
        }
        return tr;
    }

    const NameList& labels() const override { return labels_; }
    std::string kind() const override { return "hybrid"; }

private:
    // Classical fourth-order Runge-Kutta step of length h.
    void rk4(std::size_t mode, const State& x, double h, const Params& p, State& out) const {
        const std::size_t n = x.size();
        State k1(n), k2(n), k3(n), k4(n), tmp(n);
        spec_.flow(mode, x, p, k1);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k1[i];
        spec_.flow(mode, tmp, p, k2);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + 0.5 * h * k2[i];
        spec_.flow(mode, tmp, p, k3);
        for (std::size_t i = 0; i < n; ++i) tmp[i] = x[i] + h * k3[i];
        spec_.flow(mode, tmp, p, k4);
        out.resize(n);
        for (std::size_t i = 0; i < n; ++i) out[i] = x[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }

    HybridSpec spec_;
    NameList labels_;
    NameList values_;
};

struct ThermostatParams {
    double t_low = 15.0;
    double t_high = 40.0;
    double c1 = 5.0; // mean heating rate
    double c2 = 5.0; // mean cooling rate
    Distribution n1 = Gaussian{0.0, 0.25};
    Distribution n2 = Gaussian{0.0, 0.25};
    double initial_temperature = 15.0;
    double dt = 0.01;
};

/// Two-mode thermostat. Heat: dT/dt = c1 + n1 until T >= t_high; Cool:
/// dT/dt = -(c2 + n2) until T <= t_low. Label `q` marks (Cool, T <= t_low),
/// i.e. the end of one heating/cooling cycle.
inline HybridSpec thermostat(const ThermostatParams& tp = {}) {
    HybridSpec s;
    s.modes = {"Heat", "Cool"};
    s.state_names = {"T"};
    s.param_names = {"n1", "n2"};
    s.param_dists = {tp.n1, tp.n2};
    s.initial_mode = 0;
    s.initial_state = {tp.initial_temperature};
    s.dt = tp.dt;
    const double c1 = tp.c1, c2 = tp.c2, lo = tp.t_low, hi = tp.t_high;
    s.flow = [c1, c2](std::size_t mode, const State&, const Params& p, State& dx) {
        dx[0] = mode == 0 ? c1 + p[0] : -(c2 + p[1]);
    };
    s.jumps.push_back({0, 1, [hi](const State& x, const Params&) { return x[0] >= hi; }, nullptr});
    s.jumps.push_back({1, 0, [lo](const State& x, const Params&) { return x[0] <= lo; }, nullptr});
    s.predicates.push_back({"q", [lo](std::size_t mode, const State& x, const Params&) {
                                return mode == 1 && x[0] <= lo;
                            }});
    s.predicates.push_back({"heat", [](std::size_t mode, const State&, const Params&) { return mode == 0; }});
    s.predicates.push_back({"cool", [](std::size_t mode, const State&, const Params&) { return mode == 1; }});
    return s;
}

} // namespace hpstl::models
