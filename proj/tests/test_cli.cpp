#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "sle/archive.hpp"
#include "sle/config.hpp"

using namespace sle;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code = -1;
    std::string out;
    std::string err;
};

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("sle_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

Result run(const std::string& args, const fs::path& dir) {
    const fs::path out = dir / "stdout.txt";
    const fs::path err = dir / "stderr.txt";
    const std::string cmd = std::string(SLE_CLI_PATH) + " " + args + " > " + out.string() + " 2> " + err.string();
    const int status = std::system(cmd.c_str());
    Result r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = read_file(out);
    r.err = read_file(err);
    return r;
}

std::string last_line(const std::string& text) {
    std::string t = text;
    while (!t.empty() && t.back() == '\n') t.pop_back();
    return t.substr(t.rfind('\n') + 1);
}

}  // namespace

TEST_CASE("simulate brownian is reproducible bit for bit") {
    const fs::path d = scratch("brownian");
    REQUIRE(run("--seed 7 --out " + (d / "a").string() + " simulate brownian --set n=10", d).code == 0);
    REQUIRE(run("--seed 7 --out " + (d / "b").string() + " simulate brownian --set n=10", d).code == 0);
    REQUIRE(run("--seed 8 --out " + (d / "c").string() + " simulate brownian --set n=10", d).code == 0);
    const std::string a = read_file(d / "a" / "paths.slep");
    CHECK(a == read_file(d / "b" / "paths.slep"));
    CHECK(a != read_file(d / "c" / "paths.slep"));
    CHECK(decode_archive(a).size() == 10);
}

TEST_CASE("simulate sle-rho outcome counts add up") {
    const fs::path d = scratch("slerho");
    const Result r = run("--out " + d.string() + " simulate sle-rho --set n=20 --set kappa=6 --set rho=-8 --set z0=0.5i",
                         d);
    REQUIRE(r.code == 0);
    const auto meta = nlohmann::json::parse(read_file(d / "metadata.json"));
    const auto& counts = meta.at("counts");
    CHECK(counts.at("swallowed").get<int>() + counts.at("horizon").get<int>() + counts.at("unresolved").get<int>() ==
          20);
    CHECK(decode_archive(read_file(d / "paths.slep")).size() == 20);
}

TEST_CASE("simulate extended names the rho constraint") {
    const fs::path d = scratch("extended");
    const Result bad = run("--out " + d.string() + " simulate extended --set kappa=2 --set rho=-2 --set z0=1i", d);
    CHECK(bad.code == 2);
    CHECK(bad.err.find("rho <= kappa/2 - 4") != std::string::npos);
    CHECK(run("--out " + d.string() + " simulate extended --set n=5 --set kappa=2 --set rho=-6 --set z0=1i", d).code ==
          0);
}

TEST_CASE("trace of a constant driver ends at 2i") {
    const fs::path d = scratch("trace");
    std::vector<double> v(1000, 0.0);
    write_archive(d / "zero.slep", {make_finite_path<double>(1e-3, v, 1.0, 0.0)});
    REQUIRE(run("--out " + (d / "o").string() + " trace " + (d / "zero.slep").string(), d).code == 0);
    std::istringstream row(last_line(read_file(d / "o" / "curve_0.csv")));
    double t, re, im;
    char c1, c2;
    row >> t >> c1 >> re >> c2 >> im;
    CHECK(t == doctest::Approx(1.0));
    CHECK(re == doctest::Approx(0.0));
    CHECK(im == doctest::Approx(2.0));
}

TEST_CASE("trace of an empty archive warns and writes nothing") {
    const fs::path d = scratch("empty");
    write_archive(d / "empty.slep", {});
    const Result r = run("--out " + (d / "o").string() + " trace " + (d / "empty.slep").string(), d);
    CHECK(r.code == 0);
    CHECK(r.err.find("empty") != std::string::npos);
    CHECK(!fs::exists(d / "o" / "curve_0.csv"));
}

TEST_CASE("corrupted archives exit with a format error") {
    const fs::path d = scratch("corrupt");
    std::ofstream(d / "bad.slep") << "XLEPgarbage";
    CHECK(run("--out " + d.string() + " trace " + (d / "bad.slep").string(), d).code == 3);
    CHECK(run("archive-info " + (d / "bad.slep").string(), d).code == 3);
}

TEST_CASE("estimate capacity-green at a point out of reach is zero") {
    const fs::path d = scratch("capgreen");
    const Result r = run("--quick --out " + d.string() + " estimate capacity-green --set z0=3i --set t=1", d);
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(read_file(d / "estimate.json"));
    CHECK(j.at("result").at("value").get<double>() == 0.0);
}

TEST_CASE("estimate psi0 integrates the Green's function") {
    const fs::path d = scratch("psi0");
    const Result r = run("--out " + d.string() +
                             " estimate psi0 --set kappa=4 --set rho=0 --set region=-1,1,0.5,1.5", d);
    REQUIRE(r.code == 0);
    const auto j = nlohmann::json::parse(read_file(d / "estimate.json"));
    // rho = 0 gives G = 1, so the integral is the area.
    CHECK(j.at("result").at("value").get<double>() == doctest::Approx(2.0));
    CHECK(run("--out " + d.string() + " estimate psi0 --set kappa=4", d).code == 2);
}

TEST_CASE("verify prints one JSON line per test") {
    const fs::path d = scratch("verify");
    const Result r = run("--quick --out " + d.string() + " verify tail-bound", d);
    CHECK(r.code == 0);
    const auto j = nlohmann::json::parse(last_line(r.out));
    CHECK(j["name"] == "tail-bound");
    CHECK(j["passed"] == true);
    CHECK(fs::exists(d / "reports.jsonl"));
    CHECK(run("--out " + d.string() + " verify no-such-test", d).code == 2);
    CHECK(run("--quick --out " + d.string() + " verify natural-decomposition --set kappa=9", d).code == 2);
    CHECK(run("--quick --out " + d.string() + " verify all --set kappa=2", d).code == 2);
}

TEST_CASE("config files and overrides") {
    const fs::path d = scratch("config");
    std::ofstream(d / "run.cfg") << "# brownian run\nkappa = 3\nn = 4\nseed = 11\n";
    REQUIRE(run("--config " + (d / "run.cfg").string() + " --out " + (d / "a").string() + " simulate brownian", d)
                .code == 0);
    REQUIRE(run("--seed 11 --out " + (d / "b").string() + " simulate brownian --set kappa=3 --set n=4", d).code == 0);
    CHECK(read_file(d / "a" / "paths.slep") == read_file(d / "b" / "paths.slep"));
    const auto meta = nlohmann::json::parse(read_file(d / "a" / "metadata.json"));
    const RunConfig c = parse_config(meta["config"].get<std::string>());
    CHECK(c.kappa == 3.0);
    CHECK(parse_config(emit_config(c)) == c);
    CHECK(run("--out " + d.string() + " simulate brownian --set kappa=-1", d).code == 2);
    CHECK(run("--out " + d.string() + " simulate brownian --set kappa", d).code == 2);
}

TEST_CASE("verify reports are byte-identical across runs") {
    const fs::path d = scratch("determinism");
    REQUIRE(run("--seed 3 --quick --out " + (d / "a").string() + " verify strong-markov-concat --set n=300", d).code ==
            0);
    REQUIRE(run("--seed 3 --quick --out " + (d / "b").string() + " verify strong-markov-concat --set n=300", d).code ==
            0);
    CHECK(read_file(d / "a" / "reports.jsonl") == read_file(d / "b" / "reports.jsonl"));
    CHECK(read_file(d / "a" / "reports.jsonl").find("runtime_s") == std::string::npos);
    CHECK(read_file(d / "a" / "runtimes.jsonl").find("runtime_s") != std::string::npos);
}
