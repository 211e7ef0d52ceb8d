#include <gtest/gtest.h>

#include <string>

#include "hpstl/error.hpp"
#include "hpstl/io/config.hpp"
#include "hpstl/io/report.hpp"
#include "hpstl/logic/parser.hpp"
#include "hpstl/models/ctmc.hpp"
#include "hpstl/smc/verify.hpp"

using namespace hpstl;
using namespace hpstl::io;

namespace {

const std::string kDir = HPSTL_BENCH_DIR;

TEST(Config, LoadsBenchmarkModels) {
    const auto e = load_model(kDir + "/example1.yaml");
    EXPECT_EQ(e.kind, "ctmc");
    EXPECT_EQ(*e.horizon, 200.0);
    EXPECT_EQ(*e.model->state_count(), 3u);
    EXPECT_EQ(e.model->initial_states(), std::vector<std::size_t>{1});
    EXPECT_EQ(e.hash.size(), 16u);

    const auto t = load_model(kDir + "/thermostat.yaml");
    EXPECT_EQ(t.kind, "hybrid");
    EXPECT_EQ(*t.model->labels(), (std::vector<std::string>{"q", "heat", "cool"}));

    const auto q = load_model(kDir + "/queue_small.yaml");
    EXPECT_EQ(q.kind, "queue");
    EXPECT_EQ(*q.model->labels(), (std::vector<std::string>{"q1", "q2"}));
}

TEST(Config, CtmcLabelsAndInitialByIndex) {
    const auto mc = load_model_text(R"(
kind: ctmc
rates: [[-1, 1], [0, 0]]
initial: 0
labels: {s0: [idle], 1: [done, ok]}
)");
    EXPECT_FALSE(mc.horizon.has_value());
    EXPECT_EQ(*mc.model->labels(), (std::vector<std::string>{"idle", "done", "ok"}));
    const auto tr = mc.model->sample(1, 100.0);
    EXPECT_TRUE(tr.persists());
    EXPECT_EQ(tr.mask(tr.size() - 1), 6u);
}

TEST(Config, HybridDistributions) {
    for (const char* dist : {"{dist: uniform, lo: -0.1, hi: 0.1}", "{dist: constant, value: 0.5}", "0.5",
                             "{dist: normal, mean: 0, std: 0.1}"}) {
        const auto mc = load_model_text(std::string("kind: hybrid\ntemplate: thermostat\nparams: {n1: ") + dist + "}\n");
        EXPECT_EQ(mc.kind, "hybrid") << dist;
    }
    EXPECT_THROW(load_model_text("kind: hybrid\ntemplate: thermostat\nparams: {n1: {dist: cauchy}}\n"), ConfigError);
    EXPECT_THROW(load_model_text("kind: hybrid\ntemplate: thermostat\nparams: {n1: {dist: normal, std: -1}}\n"),
                 ConfigError);
    EXPECT_THROW(load_model_text("kind: hybrid\ntemplate: pendulum\n"), ConfigError);
    EXPECT_THROW(load_model_text("kind: hybrid\ntemplate: thermostat\ndt: 0\n"), ConfigError);
}

TEST(Config, QueueArrivals) {
    const auto mc = load_model_text(R"(
kind: queue
front:
  - {arrival: {dist: mmpp, rates: [1, 5], switching: [[-1, 1], [2, -2]]}, service: 4, buffer: 3}
  - {arrival: 2.0, service: 4, buffer: 3, initial: 1}
back:
  - {service: 1, buffer: 2}
)");
    const auto* q = dynamic_cast<const models::QueueModel*>(mc.model.get());
    ASSERT_NE(q, nullptr);
    EXPECT_EQ(q->config().arrivals[0].modes(), 2u);
    EXPECT_EQ(q->config().initial_front[1], 1u);
    EXPECT_THROW(load_model_text("kind: queue\nfront: []\nback: [{service: 1, buffer: 2}]\n"), ConfigError);
    EXPECT_THROW(load_model_text("kind: queue\nfront: [{arrival: {dist: weibull}, service: 1, buffer: 1}]\n"
                                 "back: [{service: 1, buffer: 2}]\n"),
                 ConfigError);
}

TEST(Config, Regions) {
    const auto mc = load_model_text(R"(
kind: ctmc
rates: [[-1, 1], [1, -1]]
regions:
  Close: {kind: absdiff_le, i: 1, j: 2, delta: 0.125}
  Far: {kind: absdiff_ge, i: 1, j: 3, delta: 0.5, dim: 3}
  B: {kind: box, intervals: [[0, 0.5], [0.25, 1]]}
  Low: {kind: lower, p: 0.3}
  H: {kind: halfspaces, dim: 2, constraints: [{coeffs: [1, 1], bound: 1}]}
  U: {kind: halfspace_union, dim: 2, constraints: [{coeffs: [1, 0], bound: 0.25}, {coeffs: [0, 1], bound: 0.25}]}
)");
    ASSERT_EQ(mc.regions.size(), 6u);
    const auto& close = mc.regions.at("Close");
    EXPECT_EQ(close.dimension(), 2u);
    EXPECT_TRUE(close.contains(std::vector<double>{0.25, 0.375}));
    EXPECT_FALSE(close.contains(std::vector<double>{0.25, 0.5}));
    EXPECT_EQ(mc.regions.at("Far").dimension(), 3u);
    EXPECT_TRUE(mc.regions.at("Far").contains(std::vector<double>{0.0, 0.3, 0.75}));
    EXPECT_TRUE(mc.regions.at("B").contains(std::vector<double>{0.5, 0.25}));
    EXPECT_TRUE(mc.regions.at("Low").contains(std::vector<double>{0.1}));
    EXPECT_FALSE(mc.regions.at("H").contains(std::vector<double>{0.75, 0.5}));
    EXPECT_TRUE(mc.regions.at("U").contains(std::vector<double>{0.75, 0.125}));
    EXPECT_FALSE(mc.regions.at("U").contains(std::vector<double>{0.75, 0.5}));
}

TEST(Config, Errors) {
    const auto bad = [](const std::string& text) { EXPECT_THROW(load_model_text(text), ConfigError) << text; };
    bad("kind: [unclosed");
    bad("- just a list");
    bad("states: [a]");
    bad("kind: petri\n");
    bad("kind: ctmc\nrates: [[-1, 1], [1, -2]]\n");          // row does not sum to zero
    bad("kind: ctmc\nrates: [[-1, 1], [1, -1]]\nspeed: 3\n"); // unknown key
    bad("kind: ctmc\nrates: [[-1, 1], [1, -1]]\ninitial: s7\n");
    bad("kind: ctmc\nrates: [[-1, 1], [1, -1]]\ninitial: 5\n");
    bad("kind: ctmc\nrates: [[-1, 1], [1, -1]]\nstates: [a]\n");
    bad("kind: ctmc\nrates: [[-1, 1], [1, -1]]\nhorizon: -3\n");
    bad("kind: ctmc\nrates: [[-1, 1], [1, -1]]\nhorizon: soon\n");
    bad("kind: ctmc\nrates: [[-1, 1], [1, -1]]\nregions: {D: {kind: blob}}\n");
    bad("kind: ctmc\nrates: [[-1, 1], [1, -1]]\nregions: {D: {kind: absdiff_le, i: 0, j: 1, delta: 0.1}}\n");
    bad("kind: ctmc\nrates: [[-1, 1], [1, -1]]\nregions: {D: {kind: box, intervals: [[0.6, 0.5]]}}\n");
    EXPECT_THROW(load_model("/nonexistent/model.yaml"), ConfigError);
}

TEST(Config, HashTracksBytes) {
    const std::string a = "kind: ctmc\nrates: [[-1, 1], [1, -1]]\n";
    EXPECT_EQ(load_model_text(a).hash, load_model_text(a).hash);
    EXPECT_NE(load_model_text(a).hash, load_model_text(a + "# comment\n").hash);
    // FNV-1a reference values
    EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ULL);
    EXPECT_EQ(hex64(fnv1a("a")), "af63dc4c8601ec8c");
}

// ---------------------------------------------------------------- reports

RunReport sample_report(bool iterations) {
    const auto mc = load_model(kDir + "/example1.yaml");
    smc::SmcConfig cfg;
    cfg.horizon = *mc.horizon;
    cfg.seed = 12;
    cfg.record_iterations = iterations;
    const auto f = logic::parse_state_formula("P{pi}(F[0,1] s0@pi) < 0.5");
    RunReport r;
    r.started_at = utc_now();
    r.inputs = {"example1.yaml", mc.hash, logic::to_string(*f), cfg.alpha, cfg.batch, cfg.horizon, cfg.seed,
                cfg.max_samples, cfg.truncation};
    r.verdict = smc::verify(mc.model, f, cfg);
    return r;
}

TEST(Report, RoundTrip) {
    for (bool its : {false, true}) {
        const auto r = sample_report(its);
        const auto back = report_from_json(Json::parse(to_json(r).dump()));
        EXPECT_EQ(back, r);
        EXPECT_EQ(back.verdict.iterations.size(), its ? r.verdict.samples[0] / 10 : 0u);
    }
}

TEST(Report, StableKeysAndVolatileFields) {
    const auto r = sample_report(false);
    const auto j = to_json(r);
    std::vector<std::string> keys;
    for (const auto& [k, v] : j.items()) keys.push_back(k);
    EXPECT_EQ(keys, (std::vector<std::string>{"assertion", "significance", "algorithm", "samples", "total_samples",
                                              "truncated", "wall_time", "inputs", "iterations", "started_at"}));
    EXPECT_EQ(j["assertion"], "false");
    EXPECT_EQ(j["inputs"]["truncation_policy"], "count-false");
    EXPECT_EQ(r.started_at.size(), 20u);
    EXPECT_EQ(r.started_at.back(), 'Z');

    auto r2 = sample_report(false);
    r2.started_at = "2000-01-01T00:00:00Z";
    r2.verdict.wall_time = 123.0;
    EXPECT_EQ(to_json(r, false).dump(), to_json(r2, false).dump());
    EXPECT_FALSE(to_json(r, false).contains("wall_time"));
}

TEST(Report, RejectsMalformed) {
    EXPECT_THROW(report_from_json(Json::parse("{}")), ConfigError);
    auto j = to_json(sample_report(false));
    j["assertion"] = "maybe";
    EXPECT_THROW(report_from_json(j), ConfigError);
    EXPECT_THROW(truncation_from("ignore"), ConfigError);
}

TEST(Report, TraceJson) {
    const models::CtmcModel m(models::example1_chain());
    const auto t = m.sample(3, 10.0);
    const auto j = to_json(t);
    EXPECT_EQ(j["kind"], "event");
    EXPECT_EQ(j["horizon"], 10.0);
    EXPECT_EQ(j["labels"], (std::vector<std::string>{"s0", "s1", "s2"}));
    ASSERT_EQ(j["segments"].size(), t.size());
    EXPECT_EQ(j["segments"][0]["t"], 0.0);
    EXPECT_EQ(j["segments"][0]["labels"], std::vector<std::string>{"s1"});
    EXPECT_EQ(j["segments"][0]["values"]["state"], 1.0);
    EXPECT_EQ(j["segments"][0]["state"], 1);
}

} // namespace
