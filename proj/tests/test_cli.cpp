#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

#include "idiff/csv.hpp"

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
    const std::string command = std::string(IDIFF_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(command.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path scratch(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("idiff_cli_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("simulate then estimate") {
    const auto dir = scratch("sim");
    const auto path = dir / "path.csv";
    CHECK(run("simulate --model ou --t-end 20 --dt 0.01 --seed 3 -o " + path.string()) == 0);
    const auto table = idiff::read_csv(path);
    CHECK(table.header == std::vector<std::string>{"t", "x", "y"});
    CHECK(table.rows.size() == 2001);

    const auto out = dir / "est.csv";
    CHECK(run("estimate -i " + path.string() +
              " --delta 0.01 --bandwidth 0.5 --lo -3 --hi -2.5 --points 5 --estimator sigma2_direct -o " + out.string()) == 0);
    CHECK(idiff::read_csv(out).rows.size() == 5);
}

TEST_CASE("exit codes") {
    const auto dir = scratch("codes");
    const auto bad = dir / "bad.json";
    std::ofstream(bad) << R"({"model": "ou", "deltas": [0.01], "bandwidths": [0.3], "ns": [1000], "L": 0,
                            "eval_range": [-2.79, -2.7]})";
    CHECK(run("experiment -c " + bad.string()) == 2);
    CHECK(run("experiment -c " + (dir / "absent.json").string()) == 4);
    CHECK(run("plot -d " + dir.string()) == 4);
    CHECK(run("simulate --model cir --x0 -1") == 2);
    CHECK(run("rates --n 1000 --delta 0.008 --bandwidth 0.12") == 0);
    CHECK(run("moment-check --model ou --reps 200 --delta 0.004") == 0);
    CHECK(run("no-such-command") == 2);
}

TEST_CASE("experiment with plots") {
    const auto dir = scratch("exp");
    const auto cfg = dir / "cfg.json";
    std::ofstream(cfg) << R"({"model": "ou", "deltas": [0.01], "bandwidths": [0.6091], "ns": [500], "L": 4,
                            "N": 10, "eval_range": [-2.79, -2.7], "master_seed": 1})";
    const auto out = dir / "out";
    CHECK(run("experiment -c " + cfg.string() + " -o " + out.string() + " --threads 2 --plot") == 0);
    CHECK(fs::exists(out / "maae.csv"));
    CHECK(fs::exists(out / "rate_delta0.01_h0.6091.svg"));
    CHECK(fs::exists(out / "curves_delta0.01_h0.6091_n500.svg"));
}

}  // TEST_SUITE
