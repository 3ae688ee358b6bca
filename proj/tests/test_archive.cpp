#include <doctest.h>

#include <filesystem>

#include "sle/archive.hpp"
#include "sle/drivers.hpp"

using namespace sle;

namespace {

std::vector<AnyPath> sample_paths() {
    std::vector<AnyPath> v;
    v.emplace_back(make_finite_path<double>(0.01, {0.0, 0.5, -0.25}, 0.03, 1.5));
    v.emplace_back(make_truncated_path<double>(0.1, {0.0, 1.0, 2.0, 3.0}, 0.4));
    v.emplace_back(make_finite_path<Complex>(0.5, {{0.0, 0.0}, {1.0, 2.0}}, 1.0, Complex{3.0, -4.0}));
    return v;
}

}  // namespace

TEST_SUITE("archive") {

TEST_CASE("round trip preserves every field bit for bit") {
    const auto paths = sample_paths();
    const auto back = decode_archive(encode_archive(paths));
    REQUIRE(back.size() == paths.size());
    const auto& a = std::get<RealPath>(back[0]);
    CHECK(a.dt == 0.01);
    CHECK(a.values == std::get<RealPath>(paths[0]).values);
    CHECK(a.lifetime == doctest::Approx(0.03));
    CHECK(*a.terminal_limit == 1.5);
    const auto& b = std::get<RealPath>(back[1]);
    CHECK(b.truncated());
    CHECK(b.horizon == doctest::Approx(0.4));
    CHECK(!b.terminal_limit);
    const auto& c = std::get<ComplexPath>(back[2]);
    CHECK(c.values[1] == Complex(1.0, 2.0));
    CHECK(*c.terminal_limit == Complex(3.0, -4.0));
    CHECK(encode_archive(back) == encode_archive(paths));
}

TEST_CASE("simulated drivers survive a file round trip") {
    DriverConfig c;
    c.kappa = 3.0;
    c.horizon = 0.5;
    std::vector<AnyPath> paths;
    for (std::uint64_t i = 0; i < 5; ++i) {
        RngStream rng(1, i);
        paths.emplace_back(simulate_brownian_driver(c, rng));
    }
    const auto file = std::filesystem::temp_directory_path() / "sle_archive_roundtrip.slep";
    write_archive(file, paths);
    const auto back = read_archive(file);
    std::filesystem::remove(file);
    REQUIRE(back.size() == 5);
    for (std::size_t i = 0; i < 5; ++i)
        CHECK(std::get<RealPath>(back[i]).values == std::get<RealPath>(paths[i]).values);
}

TEST_CASE("empty archive decodes to an empty list") {
    CHECK(decode_archive(encode_archive({})).empty());
}

TEST_CASE("corrupted archives raise format errors") {
    const std::string good = encode_archive(sample_paths());
    std::string bad_magic = good;
    bad_magic[0] = 'X';
    CHECK_THROWS_AS(decode_archive(bad_magic), FormatError);
    CHECK_THROWS_AS(decode_archive(""), FormatError);
    CHECK_THROWS_AS(decode_archive(good.substr(0, good.size() - 3)), FormatError);
    CHECK_THROWS_AS(decode_archive(good.substr(0, 10)), FormatError);
    CHECK_THROWS_AS(decode_archive(good + "x"), FormatError);
    std::string bad_version = good;
    bad_version[4] = 9;
    CHECK_THROWS_AS(decode_archive(bad_version), FormatError);
    std::string bad_flag = good;
    bad_flag[4 + 4 + 8 + 8 + 8] = 7;
    CHECK_THROWS_AS(decode_archive(bad_flag), FormatError);
}

TEST_CASE("encoding is deterministic") {
    CHECK(encode_archive(sample_paths()) == encode_archive(sample_paths()));
}

}  // TEST_SUITE
