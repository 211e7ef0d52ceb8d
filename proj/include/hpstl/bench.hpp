#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "hpstl/error.hpp"
#include "hpstl/io/config.hpp"
#include "hpstl/logic/parser.hpp"
#include "hpstl/models/random.hpp"
#include "hpstl/smc/verify.hpp"
#include "hpstl/stats/beta.hpp"
#include "hpstl/stats/clopper_pearson.hpp"

namespace hpstl::bench {

/// One benchmark setup: a model, a formula and the verdict it should give.
struct Setup {
    std::string name;
    std::string model;   // file name inside the benchmark directory
    std::string formula; // file name inside the benchmark directory
    double alpha = 0.05;
    smc::Assertion expected = smc::Assertion::True;
    double reference_samples = 0.0; // published mean sample count, 0 if none
};

struct Summary {
    Setup setup;
    std::size_t reps = 0;
    std::size_t correct = 0;
    std::size_t undecided = 0;
    double mean_samples = 0.0; // top-level tuples per P operator, summed over operators
    double mean_total = 0.0;   // every tuple drawn, nested runs included
    double mean_wall = 0.0;
    smc::Assertion majority = smc::Assertion::Undecided;

    double accuracy() const { return reps ? static_cast<double>(correct) / static_cast<double>(reps) : 0.0; }

    /// Same power of ten as the reference, or no reference.
    bool samples_match() const {
        if (setup.reference_samples <= 0.0 || mean_samples <= 0.0) return true;
        return std::fabs(std::log10(mean_samples) - std::log10(setup.reference_samples)) <= 1.0;
    }
};

inline std::vector<Setup> suite(const std::string& name) {
    using A = smc::Assertion;
    if (name == "thermostat") {
        return {
            {"d=0.9 e=0.05 a=0.05", "thermostat.yaml", "sens_d0.9_e0.05.hpstl", 0.05, A::False, 180},
            {"d=0.9 e=0.05 a=0.01", "thermostat.yaml", "sens_d0.9_e0.05.hpstl", 0.01, A::False, 500},
            {"d=0.9 e=0.01 a=0.05", "thermostat.yaml", "sens_d0.9_e0.01.hpstl", 0.05, A::False, 28},
            {"d=0.9 e=0.01 a=0.01", "thermostat.yaml", "sens_d0.9_e0.01.hpstl", 0.01, A::False, 46},
            {"d=1.1 e=0.05 a=0.05", "thermostat.yaml", "sens_d1.1_e0.05.hpstl", 0.05, A::True, 300},
            {"d=1.1 e=0.05 a=0.01", "thermostat.yaml", "sens_d1.1_e0.05.hpstl", 0.01, A::True, 610},
            {"d=1.1 e=0.01 a=0.05", "thermostat.yaml", "sens_d1.1_e0.01.hpstl", 0.05, A::False, 130},
            {"d=1.1 e=0.01 a=0.01", "thermostat.yaml", "sens_d1.1_e0.01.hpstl", 0.01, A::False, 220},
        };
    }
    if (name == "example1") {
        return {
            {"diff > 0.05 a=0.01", "example1.yaml", "example1_diff.hpstl", 0.01, A::True, 0},
            {"diff > 0.5 a=0.01", "example1.yaml", "example1_diff_large.hpstl", 0.01, A::False, 0},
        };
    }
    if (name == "queue-small") {
        return {
            {"t=0.1 d=0.1 e=0.1 a=0.05", "queue_small.yaml", "fairness_t0.1_d0.1_e0.1.hpstl", 0.05, A::False, 0},
            {"t=5.0 d=0.5 e=0.5 a=0.05", "queue_small.yaml", "fairness_t5.0_d0.5_e0.5.hpstl", 0.05, A::True, 0},
        };
    }
    throw ConfigError("unknown benchmark suite '" + name + "' (expected thermostat, example1, queue-small or stats-unit)");
}

/// Runs a setup `reps` times; repetition r uses seed derive_seed(seed_base, r).
inline Summary run_setup(const Setup& s, const std::string& dir, std::size_t reps, std::uint64_t seed_base) {
    const auto mc = io::load_model(dir + "/" + s.model);
    const auto f = logic::parse_state_formula(io::read_file(dir + "/" + s.formula));
    smc::SmcConfig cfg;
    cfg.alpha = s.alpha;
    cfg.horizon = mc.horizon.value_or(cfg.horizon);
    cfg.regions = mc.regions;

    Summary out;
    out.setup = s;
    out.reps = reps;
    std::map<smc::Assertion, std::size_t> votes;
    for (std::size_t r = 0; r < reps; ++r) {
        cfg.seed = models::derive_seed(seed_base, r);
        const auto v = smc::verify(mc.model, f, cfg);
        if (v.assertion == s.expected) ++out.correct;
        if (v.assertion == smc::Assertion::Undecided) ++out.undecided;
        ++votes[v.assertion];
        double n = 0.0;
        for (auto k : v.samples) n += static_cast<double>(k);
        out.mean_samples += n;
        out.mean_total += static_cast<double>(v.total_samples);
        out.mean_wall += v.wall_time;
    }
    if (reps) {
        const double d = static_cast<double>(reps);
        out.mean_samples /= d;
        out.mean_total /= d;
        out.mean_wall /= d;
    }
    std::size_t best = 0;
    for (const auto& [a, n] : votes) {
        if (n > best) {
            best = n;
            out.majority = a;
        }
    }
    return out;
}

inline std::string sci(double x) {
    std::ostringstream s;
    s << std::scientific << std::setprecision(1) << x;
    return s.str();
}

inline void print_table(std::ostream& os, const std::vector<Summary>& rows) {
    os << std::left << std::setw(28) << "setup" << std::setw(10) << "expected" << std::setw(10) << "majority"
       << std::setw(8) << "acc" << std::setw(11) << "samples" << std::setw(11) << "reference" << std::setw(11)
       << "all tuples" << "wall[s]\n";
    for (const auto& r : rows) {
        os << std::left << std::setw(28) << r.setup.name << std::setw(10) << smc::to_string(r.setup.expected)
           << std::setw(10) << smc::to_string(r.majority) << std::setw(8) << std::fixed << std::setprecision(2)
           << r.accuracy() << std::setw(11) << sci(r.mean_samples) << std::setw(11)
           << (r.setup.reference_samples > 0 ? sci(r.setup.reference_samples) : std::string("-")) << std::setw(11)
           << sci(r.mean_total) << std::fixed << std::setprecision(3) << r.mean_wall << "\n";
    }
}

struct UnitCheck {
    std::string name;
    double got = 0.0;
    double want = 0.0;
    double tol = 0.0;
    bool pass() const { return std::fabs(got - want) <= tol; }
};

/// Reference values of the statistics module.
inline std::vector<UnitCheck> stats_unit_checks() {
    using namespace stats;
    std::vector<UnitCheck> c;
    c.push_back({"cp_significance(0,0.5|0,10)", cp_significance(0, 0.5, 0, 10), 9.765625e-4, 0.0});
    c.push_back({"binom_cdf(5,10,0.5)", binom_cdf(5, 10, 0.5), 0.623046875, 0.0});
    c.push_back({"binom_cdf(0,12,0.3)", binom_cdf(0, 12, 0.3), std::pow(0.7, 12), 1e-12});
    c.push_back({"binom_cdf(12,12,0.3)", binom_cdf(12, 12, 0.3), 1.0, 0.0});
    c.push_back({"I_0.5(1,1)", reg_inc_beta(0.5, 1, 1), 0.5, 1e-12});
    c.push_back({"I_0.3(1,7)", reg_inc_beta(0.3, 1, 7), 1.0 - std::pow(0.7, 7), 1e-12});
    c.push_back({"I_0.5(3,3)", reg_inc_beta(0.5, 3, 3), 0.5, 1e-12});
    c.push_back({"cp_significance(0,1|37,80)", cp_significance(0, 1, 37, 80), 0.0, 1e-12});
    c.push_back({"cp_significance(0.5,1|10,10)", cp_significance(0.5, 1, 10, 10), 1.0 - (1.0 - std::pow(0.5, 10)),
                 1e-12});
    c.push_back({"cp shrink raises level", cp_significance(0.45, 0.55, 50, 100) > cp_significance(0.4, 0.6, 50, 100) ? 1.0 : 0.0,
                 1.0, 0.0});
    const Interval boxes[] = {{0.0, 0.5}, {0.0, 0.5}};
    const CountStat counts[] = {{0, 10}, {0, 10}};
    const double one = cp_significance(0, 0.5, 0, 10);
    c.push_back({"joint_significance of two boxes", joint_significance(boxes, counts), 1.0 - (1.0 - one) * (1.0 - one),
                 1e-15});
    const auto t = cp_for_threshold(2, 100, 0.5);
    c.push_back({"cp_for_threshold(2,100,0.5) asserts <", t.assertion ? 1.0 : 0.0, 1.0, 0.0});
    c.push_back({"cp_for_threshold at boundary gives 1", cp_for_threshold(50, 100, 0.5).significance, 1.0, 0.0});
    return c;
}

} // namespace hpstl::bench
