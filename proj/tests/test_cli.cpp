#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "stokeslab/config.hpp"

namespace fs = std::filesystem;
using namespace stokeslab;

namespace {

int run_cli(const std::string& args, const std::string& outdir) {
    std::string cmd = "STOKESLAB_OUTDIR=" + outdir + " ./stokeslab " + args + " >/dev/null 2>&1";
    int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream os(p, std::ios::binary);
    os << text;
}

}  // namespace

TEST_CASE("config parser") {
    Config c = Config::parse_string("[a]\nx = 1.5  # comment\ny = hello\n[b]\nz = 3\n");
    CHECK(c.get_double("a.x", 0.0) == 1.5);
    CHECK(c.get_string("a.y", "") == "hello");
    CHECK(c.get_int("b.z", 0) == 3);
    CHECK(c.get_int("b.missing", 7) == 7);
    CHECK_THROWS_AS(Config::parse_string("nokey\n"), ConfigError);
    CHECK_THROWS_AS(Config::parse_string("[a]\nx=1\nx=2\n"), ConfigError);
    CHECK_THROWS_AS(c.get_int("a.y", 0), ConfigError);
    Config d = Config::parse_string("[a]\nx = 1\n");
    CHECK_THROWS_AS(d.validate_keys({"a.z"}), ConfigError);
}

TEST_CASE("print-defaults and validate run clean") {
    CHECK(run_cli("print-defaults", "cli_out") == 0);
    fs::create_directories("cli_out");
    CHECK(run_cli("validate", "cli_out") == 0);
    CHECK(fs::exists("cli_out/validate.csv"));
    CHECK(fs::exists("cli_out/manifest.json"));
}

TEST_CASE("determinism: repeated validate runs are byte-identical") {
    fs::create_directories("cli_out_det");
    REQUIRE(run_cli("validate", "cli_out_det") == 0);
    std::string first = slurp("cli_out_det/validate.csv");
    REQUIRE(run_cli("validate", "cli_out_det") == 0);
    std::string second = slurp("cli_out_det/validate.csv");
    CHECK(first == second);
    CHECK(!first.empty());
}

TEST_CASE("bad configs exit 1 with a config error") {
    fs::create_directories("cli_out_bad");
    write_file("cli_bad1.ini", "[domain]\na = 2.0\nb = 1.0\n");
    CHECK(run_cli("run cli_bad1.ini", "cli_out_bad") == 1);
    write_file("cli_bad2.ini", "[domain]\nunknown_key = 3\n");
    CHECK(run_cli("run cli_bad2.ini", "cli_out_bad") == 1);
    write_file("cli_bad3.ini", "[grid]\nnr = 12\nmmax = 1\n[basis]\nn_modes = 100000\n");
    CHECK(run_cli("run cli_bad3.ini", "cli_out_bad") == 1);
    CHECK(run_cli("run does_not_exist.ini", "cli_out_bad") == 1);
}

TEST_CASE("spectrum experiment writes artifacts and caches the basis") {
    fs::remove_all("cli_out_spec");
    fs::create_directories("cli_out_spec");
    write_file("cli_spec.ini",
               "[run]\nexperiment = spectrum\n[grid]\nnr = 24\nmmax = 2\n[basis]\nn_modes = 10\n");
    REQUIRE(run_cli("run cli_spec.ini", "cli_out_spec") == 0);
    CHECK(fs::exists("cli_out_spec/spectrum.csv"));
    CHECK(fs::exists("cli_out_spec/kernel.csv"));
    std::string csv = slurp("cli_out_spec/spectrum.csv");
    CHECK(csv.find("index,lambda,m,k") == 0);
    // 10 modes + header
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 11);
    // cache hit on rerun: byte-identical CSV either way
    REQUIRE(run_cli("run cli_spec.ini", "cli_out_spec") == 0);
    CHECK(slurp("cli_out_spec/spectrum.csv") == csv);
    bool has_cache = false;
    for (auto& e : fs::directory_iterator("cli_out_spec/cache")) has_cache |= e.path().extension() == ".json";
    CHECK(has_cache);
}

TEST_CASE("decay experiment emits a fit row") {
    fs::remove_all("cli_out_decay");
    fs::create_directories("cli_out_decay");
    write_file("cli_decay.ini",
               "[run]\nexperiment = decay\n[grid]\nnr = 40\nmmax = 6\n[basis]\nn_modes = 60\n"
               "[decay]\nt_min = 0.002\nt_max = 0.05\nn_samples = 8\nbump_width = 0.05\n");
    REQUIRE(run_cli("run cli_decay.ini", "cli_out_decay") == 0);
    std::string csv = slurp("cli_out_decay/decay.csv");
    CHECK(csv.find("p,q,slope") == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}
