#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <vector>

#include "hpstl/error.hpp"
#include "hpstl/logic/analysis.hpp"
#include "hpstl/logic/region_compiler.hpp"

namespace hpstl::smc {

/// What to do with a sample whose truth depends on the path past the horizon.
enum class TruncationPolicy { CountFalse, CountError };

inline const char* to_string(TruncationPolicy p) {
    return p == TruncationPolicy::CountFalse ? "count-false" : "count-error";
}

struct SmcConfig {
    double alpha = 0.05;             // desired significance level
    std::uint64_t batch = 10;        // tuples drawn per operator per iteration
    double horizon = 100.0;          // sampled path length in seconds
    std::uint64_t seed = 0;          // master seed
    std::uint64_t max_samples = 1'000'000;
    TruncationPolicy truncation = TruncationPolicy::CountFalse;
    bool record_iterations = false;
    logic::RegionTable regions;      // named acceptance regions

    void validate() const {
        if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("significance must be in (0,1)");
        if (batch < 1) throw DomainError("batch size must be at least 1");
        if (!(horizon > 0.0)) throw DomainError("horizon must be positive");
        if (max_samples < batch) throw DomainError("max-samples must be at least the batch size");
    }
};

enum class Assertion { True, False, Undecided };

inline const char* to_string(Assertion a) {
    switch (a) {
    case Assertion::True: return "true";
    case Assertion::False: return "false";
    case Assertion::Undecided: return "undecided";
    }
    return "?";
}

struct IterationRecord {
    std::vector<std::uint64_t> trials;    // N_i per operator
    std::vector<std::uint64_t> successes; // T_i per operator
    double significance = 1.0;
    Assertion assertion = Assertion::Undecided;
    friend bool operator==(const IterationRecord&, const IterationRecord&) = default;
};

struct Verdict {
    Assertion assertion = Assertion::Undecided;
    double significance = 1.0;            // achieved level
    std::vector<std::uint64_t> samples;   // tuples drawn per top-level P operator
    std::uint64_t total_samples = 0;      // tuples drawn overall, nested runs included
    std::uint64_t truncated = 0;          // samples decided by the truncation policy
    double wall_time = 0.0;               // seconds
    logic::AlgorithmKind algorithm = logic::AlgorithmKind::Simple;
    std::vector<IterationRecord> iterations;
    friend bool operator==(const Verdict&, const Verdict&) = default;
};

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

} // namespace hpstl::smc
