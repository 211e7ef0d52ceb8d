#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "hpstl/io/config.hpp"
#include "hpstl/io/report.hpp"

namespace {

namespace fs = std::filesystem;

const std::string kCli = HPSTL_CLI_PATH;
const std::string kDir = HPSTL_BENCH_DIR;

struct Outcome {
    int code = -1;
    std::string out;
    std::string err;
};

class Cli : public ::testing::Test {
protected:
    void SetUp() override {
        tmp_ = fs::temp_directory_path() /
               ("hpstl_cli_" + std::to_string(::getpid()) + "_" +
                ::testing::UnitTest::GetInstance()->current_test_info()->name());
        fs::create_directories(tmp_);
    }
    void TearDown() override { fs::remove_all(tmp_); }

    std::string path(const std::string& name) const { return (tmp_ / name).string(); }

    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(path(name)) << text;
        return path(name);
    }

    Outcome run(const std::string& args) const {
        const auto out = path("stdout.txt"), err = path("stderr.txt");
        const int status = std::system((kCli + " " + args + " >" + out + " 2>" + err).c_str());
        Outcome r;
        r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
        r.out = hpstl::io::read_file(out);
        r.err = hpstl::io::read_file(err);
        return r;
    }

    fs::path tmp_;
};

std::string q(const std::string& s) { return "'" + s + "'"; }

TEST_F(Cli, ThermostatSensitivityIsTrue) {
    const auto r = run("check --model " + kDir + "/thermostat.yaml --formula " + kDir +
                       "/sens_d1.1_e0.05.hpstl --alpha 0.05 --seed 7");
    EXPECT_EQ(r.code, 0) << r.err;
    const auto j = hpstl::io::Json::parse(r.out);
    EXPECT_EQ(j["assertion"], "true");
    EXPECT_LE(j["significance"].get<double>(), 0.05);
    EXPECT_EQ(j["inputs"]["seed"], 7);
    EXPECT_EQ(j["inputs"]["horizon"], 20.0);
}

TEST_F(Cli, FalseVerdictAlsoExitsZero) {
    const auto r = run("check --model " + kDir + "/example1.yaml --formula " + kDir + "/example1_diff_large.hpstl");
    EXPECT_EQ(r.code, 0) << r.err;
    EXPECT_EQ(hpstl::io::Json::parse(r.out)["assertion"], "false");
}

TEST_F(Cli, UndecidedExitsTwo) {
    const auto model = write("coin.yaml", "kind: ctmc\nstates: [start, heads, tails]\n"
                                          "rates: [[-1, 0.5, 0.5], [0, 0, 0], [0, 0, 0]]\n"
                                          "labels: {heads: [h]}\n");
    const auto r = run("check --model " + model + " --formula " + q("P{pi}(F h@pi) < 0.5") + " --max-samples 200");
    EXPECT_EQ(r.code, 2) << r.err;
    EXPECT_EQ(hpstl::io::Json::parse(r.out)["assertion"], "undecided");
}

TEST_F(Cli, ErrorsExitOne) {
    const std::string model = " --model " + kDir + "/example1.yaml";
    const std::string ok = " --formula " + q("P{pi}(F[0,1] s0@pi) < 0.5");

    auto r = run("check" + model + ok + " --alpha 0");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("significance must be in (0,1)"), std::string::npos) << r.err;

    r = run("check" + model + " --formula " + q("P{pi}(s0@pi &) < 0.5"));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("syntax error at 1:14"), std::string::npos) << r.err;

    r = run("check --model " + path("missing.yaml") + ok);
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("cannot open"), std::string::npos) << r.err;

    r = run("check --model " + write("bad.yaml", "kind: ctmc\nrates: [[-1, 2], [1, -1]]\n") + ok);
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("invalid model"), std::string::npos) << r.err;

    r = run("check" + model + " --formula " + q("P{pi}(F[0,1] nolabel@pi) < 0.5"));
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("nolabel"), std::string::npos) << r.err;

    r = run("check" + model + " --formula " + q("P{pi}(F s0@pi) = 0.5"));
    EXPECT_EQ(r.code, 1);

    r = run("check" + model + ok + " --batch 0");
    EXPECT_EQ(r.code, 1);

    r = run("check" + model + ok + " --truncation-policy guess");
    EXPECT_EQ(r.code, 1);

    r = run("check" + model + " --formula " + q("P{pi}(G[0,inf] (s0@pi | s1@pi | s2@pi)) > 0.5") +
            " --truncation-policy count-error --horizon 5");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("horizon"), std::string::npos) << r.err;

    r = run("check" + ok);
    EXPECT_EQ(r.code, 1);
    r = run("frobnicate");
    EXPECT_EQ(r.code, 1);
    r = run("bench nosuch --reps 1");
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("unknown"), std::string::npos) << r.err;
}

TEST_F(Cli, HelpExitsZero) {
    const auto r = run("check --help");
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.out.find("--truncation-policy"), std::string::npos);
}

TEST_F(Cli, ReportFileIsDeterministic) {
    const std::string args = "check --model " + kDir + "/example1.yaml --formula " + kDir +
                             "/example1_diff.hpstl --alpha 0.01 --seed 3 --trace-stats";
    const auto a = run(args + " --report " + path("a.json"));
    const auto b = run(args + " --report " + path("b.json"));
    ASSERT_EQ(a.code, 0) << a.err;
    ASSERT_EQ(b.code, 0) << b.err;
    EXPECT_EQ(a.out.rfind("true (significance", 0), 0u) << a.out;
    auto ja = hpstl::io::Json::parse(hpstl::io::read_file(path("a.json")));
    auto jb = hpstl::io::Json::parse(hpstl::io::read_file(path("b.json")));
    EXPECT_FALSE(ja["iterations"].empty());
    for (auto* j : {&ja, &jb}) {
        j->erase("wall_time");
        j->erase("started_at");
    }
    EXPECT_EQ(ja.dump(), jb.dump());
    // the echoed inputs reproduce the run
    const auto r = hpstl::io::report_from_json(ja);
    EXPECT_EQ(r.inputs.seed, 3u);
    EXPECT_EQ(r.inputs.alpha, 0.01);
    EXPECT_EQ(r.inputs.model_hash, hpstl::io::load_model(kDir + "/example1.yaml").hash);
}

TEST_F(Cli, DumpTrace) {
    const auto r = run("check --model " + kDir + "/example1.yaml --formula " + q("P{pi}(F[0,1] s0@pi) < 0.5") +
                       " --dump-trace 4");
    EXPECT_EQ(r.code, 0);
    EXPECT_EQ(r.err.rfind("# trace 4 path pi\nt=0 labels={s1}", 0), 0u) << r.err;
}

TEST_F(Cli, StatsUnitBench) {
    const auto r = run("bench stats-unit");
    EXPECT_EQ(r.code, 0) << r.out;
    EXPECT_EQ(r.out.find("FAIL"), std::string::npos) << r.out;
    EXPECT_NE(r.out.find("PASS"), std::string::npos);
}

TEST_F(Cli, Example1Bench) {
    const auto r = run("bench example1 --reps 3");
    EXPECT_EQ(r.code, 0) << r.err;
    // the prose-consistent difference is asserted true by majority, with full accuracy
    std::istringstream lines(r.out);
    std::string line;
    bool found = false;
    while (std::getline(lines, line)) {
        if (line.rfind("diff > 0.05", 0) != 0) continue;
        std::istringstream cols(line.substr(line.find("a=")));
        std::string level, expected, majority, acc;
        cols >> level >> expected >> majority >> acc;
        EXPECT_EQ(majority, "true") << line;
        EXPECT_EQ(acc, "1.00") << line;
        found = true;
    }
    EXPECT_TRUE(found) << r.out;
}

} // namespace
