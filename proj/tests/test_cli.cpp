// SPDX-License-Identifier: Apache-2.0
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <array>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
    int code;
    std::string out;
};

// Runs the CLI with stderr discarded unless `stderr_to` is given.
Run run(const std::string& args, const std::string& env = "", const std::string& stderr_to = "/dev/null") {
    const std::string cmd = env + " " + FSO_RELAY_BIN + " " + args + " 2>" + stderr_to;
    FILE* pipe = popen(cmd.c_str(), "r");
    REQUIRE(pipe != nullptr);
    std::string out;
    std::array<char, 4096> buf{};
    while (const std::size_t n = std::fread(buf.data(), 1, buf.size(), pipe)) out.append(buf.data(), n);
    const int status = pclose(pipe);
    return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("fso_relay_cli_" + std::to_string(::getpid()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    fs::path write(const std::string& name, const std::string& text) const {
        std::ofstream(path / name) << text;
        return path / name;
    }
};

const char* kUnitScenario = R"({"schema": 1, "hops": {"mg": {"terms": [[1, 2, 1]]}, "xi_sq": 1, "A0": 1},
    "sweep": {"start_db": 0, "stop_db": 10, "step_db": 10}, "mc": {"samples": 200000}})";

}  // namespace

TEST_CASE("fit") {
    const auto r10 = run("fit --alpha 4 --beta 2 --L 10");
    REQUIRE(r10.code == 0);
    const auto doc = nlohmann::json::parse(r10.out);
    REQUIRE(doc.at("terms").size() == 10);
    for (const auto& t : doc.at("terms")) CHECK(t[1].get<double>() == 2.0);
    const auto r1 = run("fit --alpha 4 --beta 2 --L 1");
    REQUIRE(r1.code == 0);
    CHECK(nlohmann::json::parse(r1.out).at("max_relative_error").get<double>() >
          doc.at("max_relative_error").get<double>());
    CHECK(run("fit --alpha 0 --beta 2").code == 2);
    CHECK(run("fit --alpha 4 --beta 2 --L 0").code == 2);
    CHECK(run("fit --beta 2").code == 2);
}

TEST_CASE("sweep") {
    TempDir dir;
    const auto cfg = dir.write("df.json", R"({"schema": 1, "hops": {"mg": [[1, 2, 1]], "xi_sq": 1, "A0": 1},
        "protocols": ["df"], "sweep": {"start_db": 0, "stop_db": 0}})");
    const auto r = run("sweep --config " + cfg.string());
    REQUIRE(r.code == 0);
    CHECK(r.out ==
          "gamma_bar_db,protocol,outage,aber,method,bound_regime\n"
          "0.0000000000000000e+00,df,8.6466471676338741e-01,2.1132486540518713e-01,closed,false\n");
    const auto out = dir.path / "sweep.csv";
    CHECK(run("sweep --config " + cfg.string() + " --out " + out.string() + " --format csv").code == 0);
    CHECK(slurp(out) == r.out);
    CHECK(run("sweep --config " + cfg.string() + " --format tsv").code == 2);
    CHECK(run("sweep --config " + cfg.string() + " --protocol nope").code == 2);

    const auto empty = dir.write("empty.json", R"({"schema": 1, "hops": {"alpha": 4, "beta": 2},
        "protocols": [], "sweep": {"start_db": 0, "stop_db": 0}})");
    CHECK(run("sweep --config " + empty.string()).code == 2);
    CHECK(run("sweep --config " + dir.write("broken.json", "{").string()).code == 2);
    CHECK(run("sweep --config " + (dir.path / "missing.json").string()).code == 2);
}

TEST_CASE("point commands") {
    const auto out = run("outage --alpha 4 --beta 2 --gamma-bar-db 10,20 --protocol df,csi0");
    REQUIRE(out.code == 0);
    CHECK(out.out.rfind("gamma_bar_db,protocol,outage,method,bound_regime\n", 0) == 0);
    CHECK(std::count(out.out.begin(), out.out.end(), '\n') == 5);
    CHECK(run("aber --alpha 4 --beta 2 --xi-sq 2").out.find(",bound,true") != std::string::npos);
    CHECK(run("pdf --alpha 4 --beta 2 --x 0.5,1").code == 0);
    CHECK(run("cdf --alpha 4 --beta 2 --x 1 --protocol fixed").code == 0);
    CHECK(run("outage").code == 2);
    CHECK(run("pdf --alpha 4 --beta 2 --x -1").code == 2);
    // Far outside the physical range the CSI ABER series breaks down.
    const auto bad = run("aber --alpha 4 --beta 2 --gamma-bar-db 300 --protocol csi0");
    CHECK(bad.code == 3);
    CHECK(run("").code == 2);
}

TEST_CASE("verify") {
    TempDir dir;
    const auto cfg = dir.write("unit.json", kUnitScenario);
    const auto a = run("verify --config " + cfg.string());
    CHECK(a.code == 0);
    CHECK(a.out.find(",false\n") == std::string::npos);  // no failing row, no bound row
    for (const char* streams : {"1", "4", "16"})
        CHECK(run("verify --config " + cfg.string() + " --streams " + streams).out == a.out);
    CHECK(run("verify --config " + cfg.string() + " --seed 2").out != a.out);
    CHECK(run("verify --config " + cfg.string() + " --samples 10").code == 2);

    const auto bound = dir.write("bound.json", R"({"schema": 1, "hops": {"alpha": 4, "beta": 2, "xi_sq": 2},
        "protocols": ["df", "fixed"], "sweep": {"start_db": 20, "stop_db": 20}, "mc": {"samples": 100000}})");
    const auto b = run("verify --config " + bound.string());
    CHECK(b.code == 0);
    CHECK(b.out.find(",bound,") != std::string::npos);
    CHECK(b.out.find(",true,true\n") != std::string::npos);

    // A closed form far off the simulated law fails verification.
    const auto off = dir.write("off.json", R"({"schema": 1, "hops": {"alpha": 4, "beta": 2, "L": 1},
        "protocols": ["df"], "sweep": {"start_db": 10, "stop_db": 10},
        "mc": {"samples": 1000000, "fading": "gamma_gamma"}})");
    CHECK(run("verify --config " + off.string()).code == 4);
}

TEST_CASE("log level from the environment") {
    TempDir dir;
    const auto cfg = dir.write("unit.json", kUnitScenario);
    const auto log = dir.path / "stderr.txt";
    const auto quiet = run("sweep --config " + cfg.string());
    const auto loud = run("sweep --config " + cfg.string(), "FSO_RELAY_LOG=debug", log.string());
    CHECK(loud.code == 0);
    CHECK(loud.out == quiet.out);
    CHECK(slurp(log).find("debug") != std::string::npos);
}
