#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <json.hpp>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

const std::string kCli = TRANSPEC_CLI_PATH;

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("transpec_cli_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
    std::string str(const std::string& rel) const { return (path / rel).string(); }
};

int run(const std::string& args) {
    const int rc = std::system((kCli + " " + args + " > /dev/null 2>&1").c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const std::string& p) {
    std::ifstream f(p, std::ios::binary);
    REQUIRE(f.good());
    return {std::istreambuf_iterator<char>(f), std::istreambuf_iterator<char>()};
}

} // namespace

TEST_CASE("spectrum command emits csv, json and manifest") {
    TempDir d;
    const std::string out = d.str("spec1");
    REQUIRE(run("spectrum --variant open-inviscid --tau 1 --window -1,1,-10,10 --out " + out) ==
            0);
    const std::string csv = slurp(out + ".csv");
    REQUIRE(csv.rfind("re,im,residual,multiplicity\n", 0) == 0);
    // roots at 0, +-i pi, +-2 i pi, +-3 i pi: 7 rows
    REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 8);
    const json j = json::parse(slurp(out + ".json"));
    REQUIRE(j.at("counted_total") == 7);
    REQUIRE(json::parse(slurp(out + "_manifest.json")).at("command") == "spectrum");
}

TEST_CASE("viscous variant rejects eta = 0 as a usage error") {
    TempDir d;
    REQUIRE(run("spectrum --variant deadbeat-viscous --eta 0 --out " + d.str("x")) == 2);
    REQUIRE(run("simulate --system viscous-pair --eta 0 --out " + d.str("y")) == 2);
    REQUIRE(run("bogus-subcommand") == 2);
    REQUIRE(run("sweep --check theorem1") == 2); // missing --etas
}

TEST_CASE("dead-beat viscous spectrum stays left of the margin line") {
    TempDir d;
    const std::string out = d.str("fig3");
    REQUIRE(run("spectrum --variant deadbeat-viscous --eta 0.1 --window -8,1,-60,60 --out " +
                out) == 0);
    const json j = json::parse(slurp(out + ".json"));
    const double bound = -std::log(2.0) + 0.1;
    for (const auto& r : j.at("roots")) REQUIRE(r.at("re").get<double>() < bound);
}

TEST_CASE("sweep exit codes distinguish pass from check-failure") {
    TempDir d;
    REQUIRE(run("sweep --check theorem1 --etas 0.1 --delta 0.1 --window -4,1,-30,30 --out " +
                d.str("ok")) == 0);
    // eta = 0, eps = 0.1 is genuinely unstable: theorem2 margin is violated
    REQUIRE(run("sweep --check theorem2 --eta 0 --eps 0.1 --delta 0.1 --out " + d.str("bad")) ==
            1);
    // conjecture probes never fail the run
    REQUIRE(run("sweep --check conjecture3 --etas 0.1 --eps-bound 0.15 --window "
                "-1.5,0.5,-20,20 --out " +
                d.str("probe")) == 0);
}

TEST_CASE("margin command values") {
    TempDir d;
    const std::string out = d.str("m1");
    REQUIRE(run("margin --k1 0 --k2 1 --out " + out) == 0);
    const json j = json::parse(slurp(out + ".json"));
    REQUIRE(std::abs(j.at("rho2").get<double>() - std::sqrt(2.0)) < 1e-4);
    REQUIRE(std::abs(j.at("rho_bar").get<double>() - std::sqrt(2.0)) < 1e-4);
    REQUIRE(std::abs(j.at("closed_form").get<double>() - std::sqrt(2.0)) < 1e-12);

    const std::string out2 = d.str("m2");
    REQUIRE(run("margin --k1 1 --k2 2 --out " + out2) == 0);
    REQUIRE(std::abs(json::parse(slurp(out2 + ".json")).at("rho2").get<double>() - 3.0) < 1e-4);

    const std::string out3 = d.str("m3");
    REQUIRE(run("margin --matrix identity3 --out " + out3) == 0);
    REQUIRE(std::abs(json::parse(slurp(out3 + ".json")).at("rho2").get<double>() - 1.0) < 1e-6);

    REQUIRE(run("margin --out " + d.str("m4")) == 2); // neither gains nor matrix
}

TEST_CASE("simulate command: dead-beat extinction visible in the files") {
    TempDir d;
    const std::string out = d.str("sim1");
    REQUIRE(run("simulate --system inviscid-pair --controller deadbeat --n 64 --t-end 8 "
                "--out " +
                out) == 0);
    const std::string csv = slurp(out + "_trajectory.csv");
    REQUIRE(csv.rfind("t,Y,energy,max_abs_1,max_abs_2\n", 0) == 0);
    // the last line must be a fully extinguished state
    const size_t pos = csv.rfind('\n', csv.size() - 2);
    const std::string last = csv.substr(pos + 1);
    REQUIRE(last.find(",0,0,0,0") != std::string::npos);
    const json rate = json::parse(slurp(out + "_rate.json"));
    REQUIRE(rate.at("ok") == false); // finite-time zero: no envelope to fit
}

TEST_CASE("replaying a manifest reproduces the data files byte for byte") {
    TempDir d;
    const std::string a = d.str("runA"), b = d.str("runB");
    REQUIRE(run("spectrum --variant deadbeat-viscous --eta 0.1 --window -4,1,-20,20 "
                "--threads 2 --out " +
                a) == 0);
    REQUIRE(run("replay " + a + "_manifest.json --out " + b) == 0);
    REQUIRE(slurp(a + ".csv") == slurp(b + ".csv"));
    REQUIRE(slurp(a + ".json") == slurp(b + ".json"));
}

TEST_CASE("default output honors TRANSPEC_OUTPUT_DIR") {
    TempDir d;
    const int rc = std::system(("TRANSPEC_OUTPUT_DIR=" + d.path.string() + " " + kCli +
                                " margin --k1 0 --k2 1 > /dev/null 2>&1")
                                   .c_str());
    REQUIRE(WEXITSTATUS(rc) == 0);
    REQUIRE(fs::exists(d.path / "margin.json"));
    REQUIRE(fs::exists(d.path / "margin_manifest.json"));
}
