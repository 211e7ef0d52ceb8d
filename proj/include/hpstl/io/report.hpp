#pragma once

#include <chrono>
#include <cstdint>
#include <ctime>
#include <string>
#include <vector>

#include <json.hpp>

#include "hpstl/error.hpp"
#include "hpstl/semantics/trace.hpp"
#include "hpstl/smc/types.hpp"

namespace hpstl::io {

using Json = nlohmann::ordered_json;

/// Everything needed to reproduce a run bit-exactly.
struct RunInputs {
    std::string model_path;
    std::string model_hash;
    std::string formula;
    double alpha = 0.05;
    std::uint64_t batch = 10;
    double horizon = 100.0;
    std::uint64_t seed = 0;
    std::uint64_t max_samples = 1'000'000;
    smc::TruncationPolicy truncation = smc::TruncationPolicy::CountFalse;
    friend bool operator==(const RunInputs&, const RunInputs&) = default;
};

struct RunReport {
    smc::Verdict verdict;
    RunInputs inputs;
    std::string started_at; // UTC, ISO 8601
    friend bool operator==(const RunReport&, const RunReport&) = default;
};

inline std::string utc_now() {
    const auto t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace detail {

inline smc::Assertion assertion_from(const std::string& s) {
    if (s == "true") return smc::Assertion::True;
    if (s == "false") return smc::Assertion::False;
    if (s == "undecided") return smc::Assertion::Undecided;
    throw ConfigError("unknown assertion '" + s + "' in report");
}

inline logic::AlgorithmKind algorithm_from(const std::string& s) {
    for (auto k : {logic::AlgorithmKind::Simple, logic::AlgorithmKind::Joint, logic::AlgorithmKind::NestedState,
                   logic::AlgorithmKind::NestedPath}) {
        if (s == logic::to_string(k)) return k;
    }
    throw ConfigError("unknown algorithm '" + s + "' in report");
}

} // namespace detail

inline smc::TruncationPolicy truncation_from(const std::string& s) {
    if (s == "count-false") return smc::TruncationPolicy::CountFalse;
    if (s == "count-error") return smc::TruncationPolicy::CountError;
    throw ConfigError("unknown truncation policy '" + s + "' (expected count-false or count-error)");
}

/// Stable key order. With `volatile_fields` false, wall time and the start
/// timestamp are omitted so that reruns compare byte for byte.
inline Json to_json(const RunReport& r, bool volatile_fields = true) {
    const auto& v = r.verdict;
    Json j;
    j["assertion"] = smc::to_string(v.assertion);
    j["significance"] = v.significance;
    j["algorithm"] = logic::to_string(v.algorithm);
    j["samples"] = v.samples;
    j["total_samples"] = v.total_samples;
    j["truncated"] = v.truncated;
    if (volatile_fields) j["wall_time"] = v.wall_time;

    Json in;
    in["model_path"] = r.inputs.model_path;
    in["model_hash"] = r.inputs.model_hash;
    in["formula"] = r.inputs.formula;
    in["alpha"] = r.inputs.alpha;
    in["batch"] = r.inputs.batch;
    in["horizon"] = r.inputs.horizon;
    in["seed"] = r.inputs.seed;
    in["max_samples"] = r.inputs.max_samples;
    in["truncation_policy"] = smc::to_string(r.inputs.truncation);
    j["inputs"] = std::move(in);

    Json its = Json::array();
    for (const auto& it : v.iterations) {
        Json e;
        e["trials"] = it.trials;
        e["successes"] = it.successes;
        e["significance"] = it.significance;
        e["assertion"] = smc::to_string(it.assertion);
        its.push_back(std::move(e));
    }
    j["iterations"] = std::move(its);
    if (volatile_fields) j["started_at"] = r.started_at;
    return j;
}

inline RunReport report_from_json(const Json& j) {
    try {
        RunReport r;
        auto& v = r.verdict;
        v.assertion = detail::assertion_from(j.at("assertion").get<std::string>());
        v.significance = j.at("significance").get<double>();
        v.algorithm = detail::algorithm_from(j.at("algorithm").get<std::string>());
        v.samples = j.at("samples").get<std::vector<std::uint64_t>>();
        v.total_samples = j.at("total_samples").get<std::uint64_t>();
        v.truncated = j.at("truncated").get<std::uint64_t>();
        v.wall_time = j.value("wall_time", 0.0);
        const auto& in = j.at("inputs");
        r.inputs.model_path = in.at("model_path").get<std::string>();
        r.inputs.model_hash = in.at("model_hash").get<std::string>();
        r.inputs.formula = in.at("formula").get<std::string>();
        r.inputs.alpha = in.at("alpha").get<double>();
        r.inputs.batch = in.at("batch").get<std::uint64_t>();
        r.inputs.horizon = in.at("horizon").get<double>();
        r.inputs.seed = in.at("seed").get<std::uint64_t>();
        r.inputs.max_samples = in.at("max_samples").get<std::uint64_t>();
        r.inputs.truncation = truncation_from(in.at("truncation_policy").get<std::string>());
        for (const auto& e : j.at("iterations")) {
            smc::IterationRecord it;
            it.trials = e.at("trials").get<std::vector<std::uint64_t>>();
            it.successes = e.at("successes").get<std::vector<std::uint64_t>>();
            it.significance = e.at("significance").get<double>();
            it.assertion = detail::assertion_from(e.at("assertion").get<std::string>());
            v.iterations.push_back(std::move(it));
        }
        r.started_at = j.value("started_at", std::string{});
        return r;
    } catch (const Json::exception& e) {
        throw ConfigError(std::string("malformed report: ") + e.what());
    }
}

/// JSON mirror of a trace: kind, horizon, dt, names and one entry per segment.
inline Json to_json(const semantics::Trace& t) {
    Json j;
    j["kind"] = t.kind() == semantics::TraceKind::Event ? "event" : "grid";
    j["horizon"] = t.horizon();
    j["dt"] = t.dt();
    j["persists"] = t.persists();
    j["labels"] = t.label_names();
    j["values"] = t.value_names();
    Json segs = Json::array();
    for (std::size_t i = 0; i < t.size(); ++i) {
        Json s;
        s["t"] = t.time(i);
        Json on = Json::array();
        for (std::size_t l = 0; l < t.label_names().size(); ++l) {
            if ((t.mask(i) >> l) & 1u) on.push_back(t.label_names()[l]);
        }
        s["labels"] = std::move(on);
        Json vals;
        for (std::size_t k = 0; k < t.value_names().size(); ++k) vals[t.value_names()[k]] = t.value(i, k);
        s["values"] = vals.is_null() ? Json::object() : std::move(vals);
        s["state"] = t.state(i);
        segs.push_back(std::move(s));
    }
    j["segments"] = std::move(segs);
    return j;
}

} // namespace hpstl::io
