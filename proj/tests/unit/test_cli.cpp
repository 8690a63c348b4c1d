#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nelson/cli.hpp"
#include "nelson/common.hpp"

using namespace nelson;

namespace {
int call(std::vector<std::string> args) {
    args.insert(args.begin(), "nelson-fk");
    std::vector<char*> argv;
    for (auto& a : args) argv.push_back(a.data());
    return cli::run(int(argv.size()), argv.data());
}
std::string slurp(const std::filesystem::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}
}  // namespace

TEST_CASE("time grids") {
    CHECK(cli::parse_time_grid("0.5:2:4") == std::vector<double>{0.5, 1.0, 1.5, 2.0});
    CHECK(cli::parse_time_grid("1,3") == std::vector<double>{1.0, 3.0});
    CHECK_THROWS_AS(cli::parse_time_grid("2:1:3"), ConfigError);
    CHECK_THROWS_AS(cli::parse_time_grid("1:x:3"), ConfigError);
}

TEST_CASE("config text") {
    const auto s = cli::parse_config_text("# comment\nmodel.eps = 0.5\nmc.paths=100  # inline\n");
    CHECK(s.at("model.eps") == "0.5");
    CHECK(s.at("mc.paths") == "100");
    CHECK_THROWS_AS(cli::parse_config_text("model.epsilon = 1"), ConfigError);
    CHECK_THROWS_AS(cli::parse_config_text("model.eps"), ConfigError);
    auto t = s;
    t["experiment.out"] = "/tmp/x";
    CHECK(cli::config_hash(s) == cli::config_hash(t));
    t["model.eps"] = "0.6";
    CHECK(cli::config_hash(s) != cli::config_hash(t));
}

TEST_CASE("exit codes") {
    CHECK(call({"verify"}) == 2);
    CHECK(call({"verify", "--suite", "nope"}) == 2);
    CHECK(call({"energy", "--eps", "abc"}) == 2);
    CHECK(call({"energy", "--chi", "round"}) == 2);
    CHECK(call({"frobnicate"}) == 2);
}

TEST_CASE("energy run writes a manifest and CSV") {
    const auto dir = std::filesystem::temp_directory_path() / "nelson_cli_test";
    std::filesystem::remove_all(dir);
    CHECK(call({"energy", "--eps", "0", "--kappa", "4", "--t", "0.5:1:2", "--paths", "16", "--dt", "0.01",
                "--grid-radial", "8", "--grid-angular", "6", "--out", dir.string()}) == 0);
    CHECK(std::filesystem::exists(dir / "manifest.json"));
    const auto csv = slurp(dir / "energy.csv");
    CHECK(csv.find("t [time]") != std::string::npos);
    CHECK(csv.find("fock,0.5,0,0,16") != std::string::npos);
    for (const auto& e : std::filesystem::directory_iterator(dir)) CHECK(e.path().extension() != ".part");
    std::filesystem::remove_all(dir);
}

TEST_CASE("config files are overridden by flags") {
    const auto dir = std::filesystem::temp_directory_path() / "nelson_cli_cfg";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "run.cfg") << "model.eps = 0\nmodel.kappa = 4\nmc.paths = 8\nmc.dt = 0.01\n"
                                      "grid.radial = 8\ngrid.angular = 6\nexperiment.t = 0.5,1\n";
    CHECK(call({"energy", "--config", (dir / "run.cfg").string(), "--paths", "12", "--out", (dir / "o").string()}) ==
          0);
    CHECK(slurp(dir / "o" / "energy.csv").find(",12,") != std::string::npos);
    std::ofstream(dir / "bad.cfg") << "model.eps = 0\nbogus.key = 1\n";
    CHECK(call({"energy", "--config", (dir / "bad.cfg").string()}) == 2);
    std::filesystem::remove_all(dir);
}
