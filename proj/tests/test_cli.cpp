#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"

namespace fs = std::filesystem;

namespace {

const std::string kCli = ISOSPEC_CLI_PATH;

int run(const std::string& args) {
    int rc = std::system((kCli + " " + args + " > /dev/null 2>&1").c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("isospec_cli_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int c = 0;
        return c;
    }
};

}  // namespace

TEST_SUITE_BEGIN("cli");

TEST_CASE("marginal run writes reports and reruns byte-identically") {
    TempDir dir;
    std::string args =
        "marginals --set n=64 --set m=500 --set 'frame.picks=[\"R 1 2\"]' --seed 99 --out ";
    REQUIRE(run(args + (dir.path / "a").string()) == 0);
    REQUIRE(run(args + (dir.path / "b").string()) == 0);
    std::string ra = slurp(dir.path / "a" / "report.json");
    CHECK(!ra.empty());
    CHECK(ra == slurp(dir.path / "b" / "report.json"));
    CHECK(slurp(dir.path / "a" / "replicas.csv") == slurp(dir.path / "b" / "replicas.csv"));
    CHECK(ra.find("\"scenario\": \"marginals\"") != std::string::npos);
}

TEST_CASE("config file plus overrides") {
    TempDir dir;
    {
        std::ofstream cfg(dir.path / "cfg.json");
        cfg << R"({"n": 32, "d": 1, "m": 400, "rng": {"seed": 7}})";
    }
    int rc = run("marginals --config " + (dir.path / "cfg.json").string() +
                 " --set n=64 --out " + (dir.path / "out").string());
    CHECK(rc == 0);
    std::string report = slurp(dir.path / "out" / "report.json");
    // the override wins over the file value and is echoed back
    CHECK(report.find("\"n\": 64") != std::string::npos);
}

TEST_CASE("bounds subcommand reports the entry-marginal headline") {
    TempDir dir;
    int rc = std::system((kCli + " bounds --set n=100 --set d=4 --out " + dir.path.string() +
                          " > " + (dir.path / "stdout.txt").string() + " 2>&1")
                             .c_str());
    REQUIRE(WIFEXITED(rc));
    CHECK(WEXITSTATUS(rc) == 0);
    // split spectrum, stable rank n: 9 d / sqrt(n) = 3.6
    CHECK(slurp(dir.path / "stdout.txt").find("entries_w1=3.6") != std::string::npos);
    CHECK(slurp(dir.path / "report.json").find("entries_w1") != std::string::npos);
}

TEST_CASE("plot data emission") {
    TempDir dir;
    int rc = run("submatrix --set n=512 --set k=8 --set replicas=12 --plot ecdf --plot qq "
                 "--plot spectral_hist --out " +
                 dir.path.string());
    CHECK(rc == 0);
    std::string ecdf = slurp(dir.path / "plot_ecdf.csv");
    CHECK(ecdf.rfind("value,ecdf\n", 0) == 0);
    std::string qq = slurp(dir.path / "plot_qq.csv");
    CHECK(qq.rfind("u,sample_quantile,normal_quantile\n", 0) == 0);
    std::string hist = slurp(dir.path / "plot_spectral_hist.csv");
    CHECK(hist.rfind("bin_center,density,semicircle_density\n", 0) == 0);
    // 50 bins plus the header
    CHECK(std::count(hist.begin(), hist.end(), '\n') == 51);
}

TEST_CASE("malformed config exits 2 and writes nothing") {
    TempDir dir;
    {
        std::ofstream cfg(dir.path / "bad.json");
        cfg << "{ not json";
    }
    int rc = run("marginals --config " + (dir.path / "bad.json").string() + " --out " +
                 (dir.path / "out").string());
    CHECK(rc == 2);
    CHECK(!fs::exists(dir.path / "out" / "report.json"));
}

TEST_CASE("invalid usage exits 2") {
    CHECK(run("frobnicate") == 2);
    CHECK(run("") == 2);
    TempDir dir;
    CHECK(run("marginals --set nonsense_key=1 --out " + dir.path.string()) == 2);
    CHECK(run("marginals --set n=64 --set spectrum.kind=nonsense --out " + dir.path.string()) ==
          2);
}

TEST_SUITE_END();
