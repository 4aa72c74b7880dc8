#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rfp/cli/cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args) {
    std::ostringstream out, err;
    int code = rfp::cli::run(args, out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
    auto p = fs::temp_directory_path() / ("rfp_cli_" + name);
    fs::remove_all(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

}  // namespace

TEST(Cli, HelpOnEverySubcommandExitsZero) {
    const std::vector<std::vector<std::string>> cmds = {
        {},
        {"generate"},
        {"dataset"},
        {"train"},
        {"train", "device"},
        {"train", "distance"},
        {"train", "curriculum"},
        {"ensemble"},
        {"ensemble", "assemble"},
        {"ensemble", "finetune"},
        {"eval"},
        {"report"},
        {"report", "heatmap"},
        {"report", "compare"},
    };
    for (auto args : cmds) {
        args.push_back("--help");
        auto r = invoke(args);
        EXPECT_EQ(r.code, 0) << args.front() << ": " << r.err;
        EXPECT_NE(r.out.find("Usage"), std::string::npos) << r.out;
    }
}

TEST(Cli, UnknownFlagIsNamed) {
    auto r = invoke({"--bogus"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--bogus"), std::string::npos) << r.err;

    r = invoke({"generate", "--nope", "3"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("--nope"), std::string::npos) << r.err;
}

TEST(Cli, UsageErrors) {
    EXPECT_EQ(invoke({}).code, 2);
    EXPECT_EQ(invoke({"train", "device"}).code, 2);  // --distance is required
    EXPECT_EQ(invoke({"train", "device", "--distance", "x"}).code, 2);
}

TEST(Cli, RuntimeErrorsExitOne) {
    auto out = scratch("errors");
    auto r = invoke({"--out", out.string(), "generate", "--preset", "nosuch"});
    EXPECT_EQ(r.code, 1);
    EXPECT_NE(r.err.find("rfp: error:"), std::string::npos);
    EXPECT_NE(r.err.find("nosuch"), std::string::npos) << r.err;

    r = invoke({"--out", out.string(), "ensemble", "assemble"});
    EXPECT_EQ(r.code, 1) << r.err;
    fs::remove_all(out);
}

TEST(Cli, TinyPipelineEndToEnd) {
    auto out = scratch("tiny");
    const std::string o = out.string();
    auto ok = [&](std::vector<std::string> args) {
        std::vector<std::string> full = {"-q", "--seed", "5", "--out", o};
        full.insert(full.end(), args.begin(), args.end());
        auto r = invoke(full);
        EXPECT_EQ(r.code, 0) << args.front() << ": " << r.err;
    };
    ok({"generate", "--preset", "tiny"});
    ASSERT_TRUE(fs::exists(out / "captures" / "manifest.json"));
    ok({"train", "distance", "--epochs", "1"});
    ok({"train", "device", "--distance", "2", "--epochs", "1"});
    ok({"train", "device", "--distance", "14", "--epochs", "1"});
    ok({"ensemble", "assemble"});
    ok({"eval"});
    ok({"report", "heatmap"});

    EXPECT_TRUE(fs::exists(out / "ensemble" / "ensemble.json"));
    EXPECT_TRUE(fs::exists(out / "models" / "resnet" / "device_14ft.csv"));
    EXPECT_TRUE(fs::exists(out / "runs" / "generate.json"));

    auto metrics = slurp(out / "eval" / "ensemble_test_metrics.csv");
    EXPECT_EQ(metrics.rfind("class,precision,recall,support,empty_column\n", 0), 0u) << metrics;
    auto grid = slurp(out / "reports" / "heatmap.csv");
    EXPECT_EQ(grid.rfind("distance_ft,dev00,dev01,dev02,row_avg\n", 0), 0u) << grid;
    fs::remove_all(out);
}
