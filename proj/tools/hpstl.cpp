// hpstl: statistical model checking of HyperPSTL formulas.
//
//   hpstl check --model M.yaml --formula F.hpstl [--alpha A] [--seed S] ...
//   hpstl bench thermostat|example1|queue-small|stats-unit [--reps R]
//
// Exit status: 0 verdict true or false, 2 undecided, 1 usage or input error.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "hpstl.hpp"
#include "hpstl/bench.hpp"

#ifndef HPSTL_BENCH_DIR
#define HPSTL_BENCH_DIR "benchmarks"
#endif

namespace {

using namespace hpstl;

struct CheckArgs {
    std::string model;
    std::string formula;
    double alpha = 0.05;
    std::uint64_t batch = 10;
    std::optional<double> horizon;
    std::uint64_t seed = 0;
    std::uint64_t max_samples = 1'000'000;
    std::string report;
    bool trace_stats = false;
    std::string truncation = "count-false";
    std::optional<std::uint64_t> dump_trace;
};

// Formula files carry one state formula; a literal is accepted when no such file exists.
std::string formula_text(const std::string& arg) {
    std::ifstream probe(arg);
    return probe ? io::read_file(arg) : arg;
}

void dump_trace(const models::ModelPtr& model, const logic::FormulaPtr& f, const smc::SmcConfig& cfg,
                std::uint64_t k) {
    // Tuple k of the first P operator, as drawn by the simple and joint engines.
    const auto leaves = logic::prob_leaves(*f);
    if (leaves.empty()) throw ConfigError("formula has no probability operator to sample for");
    const auto& leaf = std::get<logic::Prob>(leaves.front()->node);
    const auto tuple = models::sample_tuple(*model, leaf.pathvars.size(), models::derive_seed(cfg.seed, 0, k),
                                            cfg.horizon);
    for (std::size_t i = 0; i < tuple.size(); ++i) {
        std::cerr << "# trace " << k << " path " << leaf.pathvars[i] << "\n" << tuple[i].dump();
    }
}

int run_check(const CheckArgs& a) {
    const auto mc = io::load_model(a.model);
    const auto text = formula_text(a.formula);
    const auto f = logic::parse_state_formula(text);

    smc::SmcConfig cfg;
    cfg.alpha = a.alpha;
    cfg.batch = a.batch;
    cfg.horizon = a.horizon ? *a.horizon : mc.horizon.value_or(cfg.horizon);
    cfg.seed = a.seed;
    cfg.max_samples = a.max_samples;
    cfg.truncation = io::truncation_from(a.truncation);
    cfg.record_iterations = a.trace_stats;
    cfg.regions = mc.regions;
    cfg.validate();

    if (a.dump_trace) dump_trace(mc.model, f, cfg, *a.dump_trace);

    io::RunReport r;
    r.started_at = io::utc_now();
    r.inputs = {a.model, mc.hash, logic::to_string(*f), cfg.alpha, cfg.batch, cfg.horizon, cfg.seed,
                cfg.max_samples, cfg.truncation};
    r.verdict = smc::verify(mc.model, f, cfg);

    const auto doc = io::to_json(r).dump(2) + "\n";
    if (a.report.empty()) {
        std::cout << doc;
    } else {
        std::ofstream out(a.report);
        if (!out) throw ConfigError("cannot write report to '" + a.report + "'");
        out << doc;
        std::cout << smc::to_string(r.verdict.assertion) << " (significance " << r.verdict.significance << ", "
                  << r.verdict.total_samples << " samples)\n";
    }
    if (r.verdict.truncated > 0) {
        std::cerr << "note: " << r.verdict.truncated << " samples reached the horizon undecided and were counted as "
                  << (cfg.truncation == smc::TruncationPolicy::CountFalse ? "false" : "errors") << "\n";
    }
    return r.verdict.assertion == smc::Assertion::Undecided ? 2 : 0;
}

int run_bench(const std::string& name, std::size_t reps, std::uint64_t seed_base, const std::string& dir) {
    if (name == "stats-unit") {
        bool ok = true;
        for (const auto& c : bench::stats_unit_checks()) {
            std::cout << (c.pass() ? "PASS " : "FAIL ") << c.name << " = " << c.got << " (want " << c.want << ")\n";
            ok = ok && c.pass();
        }
        return ok ? 0 : 2;
    }
    std::vector<bench::Summary> rows;
    for (const auto& s : bench::suite(name)) {
        rows.push_back(bench::run_setup(s, dir, reps, seed_base));
        std::cerr << "done: " << s.name << "\n";
    }
    bench::print_table(std::cout, rows);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Statistical model checker for HyperPSTL over stochastic systems"};
    app.require_subcommand(1);

    CheckArgs ca;
    auto* check = app.add_subcommand("check", "Verify one state formula on one model");
    check->add_option("--model", ca.model, "Model config (YAML)")->required();
    check->add_option("--formula", ca.formula, "Formula file, or the formula text itself")->required();
    check->add_option("--alpha", ca.alpha, "Desired significance level, in (0,1)")->capture_default_str();
    check->add_option("--batch", ca.batch, "Tuples drawn per operator per iteration")->capture_default_str();
    check->add_option("--horizon", ca.horizon, "Path length in seconds (default: the model's, else 100)");
    check->add_option("--seed", ca.seed, "Master seed")->capture_default_str();
    check->add_option("--max-samples", ca.max_samples, "Sample cap; reaching it gives undecided")
        ->capture_default_str();
    check->add_option("--report", ca.report, "Write the JSON report here instead of stdout");
    check->add_flag("--trace-stats", ca.trace_stats, "Include the per-iteration log in the report");
    check->add_option("--truncation-policy", ca.truncation, "count-false or count-error")
        ->check(CLI::IsMember({"count-false", "count-error"}))
        ->capture_default_str();
    check->add_option("--dump-trace", ca.dump_trace, "Print the k-th sampled tuple to stderr");

    std::string suite;
    std::size_t reps = 20;
    std::uint64_t seed_base = 1;
    std::string dir = HPSTL_BENCH_DIR;
    auto* bench = app.add_subcommand("bench", "Run a benchmark suite and print a summary table");
    bench->add_option("suite", suite, "thermostat, example1, queue-small or stats-unit")->required();
    bench->add_option("--reps", reps, "Repetitions per setup")->capture_default_str();
    bench->add_option("--seed-base", seed_base, "Repetition r uses a seed derived from this")->capture_default_str();
    bench->add_option("--dir", dir, "Directory with the benchmark configs")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*check) return run_check(ca);
        return run_bench(suite, reps, seed_base, dir);
    } catch (const ParseError& e) {
        std::cerr << "syntax error at " << e.what() << "\n";
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
    }
    return 1;
}
