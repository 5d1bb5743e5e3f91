#include <doctest.h>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include "kakeyakit/cutmove.hpp"
#include "kakeyakit/io.hpp"
#include "kakeyakit/kakeya.hpp"
#include "kakeyakit/runner.hpp"

using namespace kakeyakit;
using namespace kakeyakit::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("kakeyakit_cli_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

int invoke(std::initializer_list<std::string> args) {
    std::vector<std::string> store{"kakeyakit"};
    store.insert(store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& s : store) argv.push_back(s.data());
    return run(static_cast<int>(argv.size()), argv.data());
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("number formatting") {
    CHECK(format_number(0.25) == "0.25");
    CHECK(format_number(1.0 / 3) == "0.333333333333");
    CHECK(format_number(-0.0) == "0");
    CHECK(format_number(INFINITY) == "inf");
    CHECK(format_number(-INFINITY) == "-inf");
    CHECK(format_number(NAN) == "nan");
}

TEST_CASE("csv quoting and width") {
    CsvTable t({"a", "b"});
    t.row({"1", "x,y"}).row({"he said \"hi\"", "line\nbreak"});
    CHECK(t.str() == "a,b\n1,\"x,y\"\n\"he said \"\"hi\"\"\",\"line\nbreak\"\n");
    CHECK_THROWS(t.row({"only one"}));
}

TEST_CASE("figure panel svg") {
    const std::vector<int> levels{0, 4};
    const auto panels = figure_panels(fan64(), levels);
    const auto svg = figure_panel_svg(panels[1]);
    CHECK(svg.find("<svg") != std::string::npos);
    CHECK(svg.find("version=\"1.1\"") != std::string::npos);
    CHECK(svg.find("</svg>") != std::string::npos);
}

TEST_CASE("config values") {
    ExperimentConfig cfg;
    apply_config_entry(cfg, "deltas", "1/16, 2^-5,0.015625");
    REQUIRE(cfg.deltas.size() == 3);
    CHECK(cfg.deltas[0] == 1.0 / 16);
    CHECK(cfg.deltas[1] == 1.0 / 32);
    CHECK(cfg.deltas[2] == 1.0 / 64);
    apply_config_entry(cfg, "seed", "42");
    CHECK(cfg.seed == 42);
    apply_config_entry(cfg, "zoom_k", "1,2,3");
    CHECK(cfg.zoom_k == std::vector<int>{1, 2, 3});
    CHECK_THROWS_AS(apply_config_entry(cfg, "deltas", "0.3"), UsageError);
    CHECK_THROWS_AS(apply_config_entry(cfg, "deltas", "2"), UsageError);
    CHECK_THROWS_AS(apply_config_entry(cfg, "deltas", "0"), UsageError);
    CHECK_THROWS_AS(apply_config_entry(cfg, "seed", "abc"), UsageError);
    CHECK_THROWS_AS(apply_config_entry(cfg, "colour", "red"), UsageError);
}

TEST_CASE("config files") {
    const auto dir = scratch("config");
    const auto path = dir / "run.cfg";
    std::ofstream(path) << "# comment\nseed = 7\n\n  d=3  # trailing\nout = somewhere\n";
    const auto entries = read_config_file(path.string());
    CHECK(entries.at("seed") == "7");
    CHECK(entries.at("d") == "3");
    CHECK(entries.at("out") == "somewhere");
    std::ofstream(dir / "bad.cfg") << "seed 7\n";
    CHECK_THROWS_AS(read_config_file((dir / "bad.cfg").string()), UsageError);
    CHECK_THROWS_AS(read_config_file((dir / "missing.cfg").string()), UsageError);
}

TEST_CASE("flags override the config file") {
    const auto dir = scratch("override");
    const auto cfg = dir / "run.cfg";
    std::ofstream(cfg) << "out = " << (dir / "from_config").string() << "\n";
    CHECK(invoke({"figure1", "--config", cfg.string(), "--out", (dir / "from_flag").string()}) == 0);
    CHECK(fs::exists(dir / "from_flag" / "figure1.csv"));
    CHECK_FALSE(fs::exists(dir / "from_config"));
}

TEST_CASE("figure1 writes four panels") {
    const auto dir = scratch("figure1");
    CHECK(invoke({"figure1", "--out", dir.string()}) == 0);
    for (int level : {0, 1, 2, 4}) CHECK(fs::exists(dir / ("figure1_level" + std::to_string(level) + ".svg")));
    const auto csv = slurp(dir / "figure1.csv");
    CHECK(csv.find('\r') == std::string::npos);
}

TEST_CASE("usage errors exit with 2") {
    const auto dir = scratch("usage");
    CHECK(invoke({}) == 2);
    CHECK(invoke({"nosuchcommand"}) == 2);
    CHECK(invoke({"lbd", "--deltas", "0.3", "--out", dir.string()}) == 2);
    CHECK(invoke({"lbd", "--config", (dir / "missing.cfg").string()}) == 2);
    CHECK(invoke({"dimension", "--generator", "cloud", "--out", dir.string()}) == 2);
    CHECK(invoke({"--help"}) == 0);
}

TEST_CASE("assertion failures exit with 1 and leave a report") {
    const auto dir = scratch("failure");
    // Eight directions cannot fill the raster ball, so the shifted-union check fails.
    CHECK(invoke({"dense", "--density", "8", "--trials", "2", "--out", dir.string()}) == 1);
    const auto report = nlohmann::json::parse(slurp(dir / "failure_report.json"));
    CHECK(report["subcommand"] == "dense");
    CHECK(report["status"] == "fail");
    CHECK(report["seed"] == 20140601);
    CHECK(report["failures"].size() > 0);
    CHECK(report["failures"][0].contains("check"));
}

TEST_CASE("same seed gives the same bytes") {
    const auto a = scratch("det_a"), b = scratch("det_b");
    CHECK(invoke({"lbd", "--deltas", "1/16,1/32", "--seed", "5", "--out", a.string()}) == 0);
    CHECK(invoke({"lbd", "--deltas", "1/16,1/32", "--seed", "5", "--out", b.string()}) == 0);
    CHECK(slurp(a / "lbd.csv") == slurp(b / "lbd.csv"));
    CHECK_FALSE(slurp(a / "lbd.csv").empty());
}

TEST_CASE("dimension of the ball is near 2") {
    ExperimentConfig cfg;
    cfg.generator = "ball";
    apply_config_entry(cfg, "deltas", "1/8,1/16,1/32,1/64,1/128,1/256");
    const auto r = run_dimension(cfg);
    CHECK(r.failures.empty());
    const auto csv = r.artifacts.at("dimension_ball_summary.csv");
    CHECK(csv.find("ball") != std::string::npos);
}

}  // TEST_SUITE
