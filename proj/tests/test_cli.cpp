#include "doctest.h"

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "sbqcp/cli.hpp"
#include "sbqcp/errors.hpp"

using namespace sbqcp;
using namespace sbqcp::cli;

namespace {

RunConfig parse(std::vector<std::string> args)
{
    args.insert(args.begin(), "sbqcp");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return parse_config(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::filesystem::path scratch_dir()
{
    auto dir = std::filesystem::temp_directory_path() / "sbqcp_test_cli";
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("flags")
{
    const auto c = parse({"qcp", "--s", "0.5", "--delta", "0.1"});
    CHECK(c.command == "qcp");
    CHECK(c.s == 0.5);
    CHECK(c.delta == 0.1);
    CHECK(c.panels == 64);
    CHECK(c.format == "csv");
}

TEST_CASE("validation names the key")
{
    try {
        parse({"qcp", "--s", "-1"});
        FAIL("expected UsageError");
    } catch (const UsageError& e) {
        CHECK(std::string(e.what()) == "s must be > 0");
    }
    CHECK_THROWS_AS(parse({"qcp", "--bogus", "1"}), UsageError);
    CHECK_THROWS_AS(parse({"--s", "1"}), UsageError);
    CHECK_THROWS_AS(parse({"scan", "--alpha", "0.5:0.1:3"}), UsageError);
    CHECK_THROWS_AS(parse({"scan", "--format", "xml"}), UsageError);
}

TEST_CASE("file values yield to flags")
{
    const auto path = (scratch_dir() / "run.cfg").string();
    {
        std::ofstream out(path);
        out << "# comment\ns = 0.5\ndelta=0.2\n";
    }
    const auto c = parse({"sh-solve", "--config", path, "--s", "0.75"});
    CHECK(c.s == 0.75);
    CHECK(c.delta == 0.2);
    {
        std::ofstream out(path);
        out << "colour=blue\n";
    }
    CHECK_THROWS_AS(parse({"sh-solve", "--config", path}), UsageError);
}

TEST_CASE("grid specs")
{
    const auto g = parse_grid("0.05:0.95:19");
    const auto v = g.values();
    REQUIRE(v.size() == 19);
    CHECK(v.front() == 0.05);
    CHECK(v.back() == 0.95);
    CHECK(v[1] == doctest::Approx(0.1));
    const auto lg = parse_grid("1e-3:1:4:log").values();
    CHECK(lg[1] == doctest::Approx(1e-2));
    CHECK(parse_grid("0.3").values() == std::vector<double>{0.3});
    CHECK(parse_grid("0.05:0.95:19").str() == "0.05:0.95:19");
    CHECK_THROWS_AS(parse_grid("1:2"), UsageError);
    CHECK_THROWS_AS(parse_grid("1:2:3:lin"), UsageError);
}

TEST_CASE("config round trip")
{
    RunConfig c;
    c.command = "scan";
    c.s = 0.3333333333333333;
    c.delta = 0.07;
    c.alpha = "0.01:0.2:7:log";
    c.strict = true;
    c.sensitivity = "0.05,0.1";
    CHECK(RunConfig::from_map(c.to_map()) == c);
    auto kv = c.to_map();
    kv["extra"] = "1";
    CHECK_THROWS_AS(RunConfig::from_map(kv), UsageError);
}

TEST_CASE("number formatting")
{
    CHECK(format_number(0.1) == "0.1");
    CHECK(format_number(std::nan("")).empty());
    for (double x : {1.0 / 3.0, -2.5e-300, 6.02214076e23}) CHECK(std::stod(format_number(x)) == x);
}

TEST_CASE("csv emission")
{
    const auto path = (scratch_dir() / "empty.csv").string();
    emit_csv(Table{{"alpha", "dE"}, {}}, path);
    CHECK(slurp(path) == "alpha,dE\n");
    Table t{{"a", "b"}, {{"1", format_number(std::nan(""))}}};
    CHECK(to_csv(t) == "a,b\n1,\n");
    CHECK_THROWS_AS(emit_csv(t, "/nonexistent-dir/x.csv"), IoError);
    const auto j = nlohmann::json::parse(to_json(t));
    CHECK(j[0]["a"] == 1.0);
    CHECK(j[0]["b"].is_null());
}

TEST_CASE("runs write outputs and manifests")
{
    const auto out = (scratch_dir() / "scan.csv").string();
    const auto cfg = parse({"scan", "--s", "1", "--delta", "0.1", "--alpha", "0:0.6:3", "--output", out});
    std::ostringstream so, se;
    omp_set_num_threads(1);
    CHECK(run_command(cfg, so, se) == 0);
    const std::string first = slurp(out);
    CHECK(first.rfind("alpha,tau,rho,M,W,eta,E_sh,E_deg,E_sup,flags\n", 0) == 0);
    omp_set_num_threads(4);
    CHECK(run_command(cfg, so, se) == 0);
    CHECK(slurp(out) == first);

    const auto m = nlohmann::json::parse(slurp(out + ".manifest.json"));
    KeyValues kv;
    for (auto it = m["config"].begin(); it != m["config"].end(); ++it) kv[it.key()] = it.value().get<std::string>();
    CHECK(RunConfig::from_map(kv) == cfg);
    CHECK(m["version"] == kVersion);
    CHECK(m.contains("wall_time_s"));
}

TEST_CASE("exit codes")
{
    std::ostringstream so, se;
    auto run = [&](std::vector<std::string> args) {
        args.insert(args.begin(), "sbqcp");
        std::vector<const char*> argv;
        for (const auto& a : args) argv.push_back(a.c_str());
        return run_cli(static_cast<int>(argv.size()), argv.data(), so, se);
    };
    CHECK(run({"sh-solve", "--s", "0.5", "--alpha", "0.1"}) == 0);
    CHECK(run({"sh-solve", "--s", "-1"}) == 2);
    CHECK(run({"qcp", "--s", "1.5", "--method", "sh"}) == 1);
    CHECK(run({"oracle-check", "--modes", "2", "--nmax", "6", "--alpha", "0.2"}) == 0);
    so.str("");
    CHECK(run({"--help"}) == 0);
    CHECK(so.str().find("oracle-check") != std::string::npos);
    so.str("");
    CHECK(run({"--version"}) == 0);
    CHECK(so.str() == std::string(kVersion) + "\n");
}
