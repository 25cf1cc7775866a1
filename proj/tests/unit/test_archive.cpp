#include <doctest.h>

#include "test_helpers.hpp"

#include <ddm/archive.hpp>
#include <ddm/errors.hpp>

#include <json.hpp>

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace ddm;
using ddmtest::TempDir;

namespace {

ResultArchive sample_archive(unsigned seed)
{
    ResultArchive archive;
    archive.map.width = 6;
    archive.map.height = 4;
    archive.map.frame_interval = 0.5;
    archive.map.lags = {0, 1, 3};
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> dist(0.0, 100.0);
    archive.map.values.resize(3 * static_cast<std::size_t>(archive.map.plane_size()));
    for (auto& v : archive.map.values)
        v = dist(rng);
    archive.frames = 8;
    archive.algorithm = "with_ft";
    archive.precision = "f64";
    archive.workers = 2;
    archive.counters.spatial_ffts = 8;
    archive.counters.temporal_ffts = 48;
    archive.timing.disk = 0.25;
    archive.timing.finish(1.0);
    return archive;
}

std::string file_bytes(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

} // namespace

TEST_CASE("results round trip exactly")
{
    TempDir dir;
    const auto archive = sample_archive(3);
    const auto manifest = write_results(archive, dir.path());
    CHECK(std::filesystem::exists(manifest));
    CHECK(std::filesystem::exists(dir.path() / "d_m0.bin"));
    CHECK(std::filesystem::exists(dir.path() / "d_m3.bin"));

    const auto back = read_results(dir.path());
    CHECK_EQ(back.map.width, 6);
    CHECK_EQ(back.map.height, 4);
    CHECK_EQ(back.map.frame_interval, 0.5);
    CHECK(back.map.lags == archive.map.lags);
    CHECK(back.map.values == archive.map.values);
    CHECK_EQ(back.frames, 8);
    CHECK_EQ(back.algorithm, "with_ft");
    CHECK_EQ(back.precision, "f64");
    CHECK_EQ(back.workers, 2);
    CHECK_EQ(back.counters.spatial_ffts, 8);
    CHECK_EQ(back.counters.temporal_ffts, 48);
    CHECK(!back.q_max.has_value());
}

TEST_CASE("map files and manifest are byte stable outside the timing section")
{
    TempDir d1, d2;
    auto a = sample_archive(5);
    auto b = sample_archive(5);
    b.timing = TimingBreakdown{};
    b.timing.disk = 9.0;
    b.timing.finish(40.0);

    write_results(a, d1.path());
    write_results(b, d2.path());

    for (const auto lag : {0, 1, 3})
        CHECK(file_bytes(d1.path() / ("d_m" + std::to_string(lag) + ".bin")) ==
              file_bytes(d2.path() / ("d_m" + std::to_string(lag) + ".bin")));

    auto ja = nlohmann::json::parse(file_bytes(d1.path() / "index.json"));
    auto jb = nlohmann::json::parse(file_bytes(d2.path() / "index.json"));
    CHECK(ja.at("timing") != jb.at("timing"));
    ja.erase("timing");
    jb.erase("timing");
    CHECK_EQ(ja.dump(), jb.dump());
}

TEST_CASE("empty lag list is rejected")
{
    TempDir dir;
    ResultArchive archive = sample_archive(7);
    archive.map.lags.clear();
    archive.map.values.clear();
    CHECK_THROWS_AS(write_results(archive, dir.path()), InputError);
}

TEST_CASE("validation rejects poisoned maps")
{
    auto archive = sample_archive(9);
    archive.validate();

    auto bad = archive;
    bad.map.values[5] = std::nan("");
    CHECK_THROWS_AS(bad.validate(), InputError);

    bad = archive;
    bad.map.values[5] = -1.0; // far below round-off against a peak of ~100
    CHECK_THROWS_AS(bad.validate(), InputError);

    bad = archive;
    bad.map.values[5] = -1e-12 * 100.0; // round-off scale, tolerated
    bad.validate();
}

TEST_CASE("reading garbage manifests raises input errors")
{
    TempDir dir;
    std::ofstream(dir.path() / "index.json") << "{not json";
    CHECK_THROWS_AS(read_results(dir.path()), InputError);
    CHECK_THROWS_AS(read_results(dir.path() / "missing"), IoError);
}

TEST_CASE("partials round trip exactly")
{
    TempDir dir;
    PartialResult partial;
    partial.group = 2;
    partial.wv_begin = 10;
    partial.wv_end = 14;
    partial.width = 6;
    partial.height = 4;
    partial.frames = 8;
    partial.frame_interval = 0.5;
    partial.q_max = 3.5;
    partial.lags = {1, 2};
    partial.values = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0};

    const auto file = write_partial(partial, dir.path());
    CHECK_EQ(file.filename().string(), "group2.bin");

    const auto back = read_partial(file);
    CHECK_EQ(back.group, 2);
    CHECK_EQ(back.wv_begin, 10);
    CHECK_EQ(back.wv_end, 14);
    CHECK_EQ(back.width, 6);
    CHECK_EQ(back.height, 4);
    CHECK_EQ(back.frames, 8);
    CHECK_EQ(back.frame_interval, 0.5);
    REQUIRE(back.q_max.has_value());
    CHECK_EQ(*back.q_max, 3.5);
    CHECK(back.lags == partial.lags);
    CHECK(back.values == partial.values);
}

TEST_CASE("partial with inconsistent payload is rejected")
{
    TempDir dir;
    PartialResult partial;
    partial.group = 0;
    partial.wv_begin = 0;
    partial.wv_end = 3;
    partial.width = 4;
    partial.height = 4;
    partial.frames = 4;
    partial.lags = {1};
    partial.values = {1.0, 2.0}; // needs 3
    CHECK_THROWS_AS(write_partial(partial, dir.path()), InputError);
}

TEST_CASE("partial listing sorts numerically by group")
{
    TempDir dir;
    for (const std::int64_t g : {0, 2, 10}) {
        PartialResult partial;
        partial.group = g;
        partial.wv_begin = 0;
        partial.wv_end = 1;
        partial.width = 2;
        partial.height = 2;
        partial.frames = 2;
        partial.lags = {1};
        partial.values = {1.0};
        write_partial(partial, dir.path());
    }
    const auto files = list_partials(dir.path());
    REQUIRE_EQ(files.size(), 3);
    CHECK_EQ(files[0].filename().string(), "group0.bin");
    CHECK_EQ(files[1].filename().string(), "group2.bin");
    CHECK_EQ(files[2].filename().string(), "group10.bin");
}

TEST_CASE("truncated partial raises input error")
{
    TempDir dir;
    PartialResult partial;
    partial.group = 0;
    partial.wv_begin = 0;
    partial.wv_end = 2;
    partial.width = 2;
    partial.height = 2;
    partial.frames = 2;
    partial.lags = {1};
    partial.values = {1.0, 2.0};
    const auto file = write_partial(partial, dir.path());
    std::filesystem::resize_file(file, 10);
    CHECK_THROWS_AS(read_partial(file), InputError);
}

TEST_CASE("listing without a partials directory is empty")
{
    TempDir dir;
    CHECK(list_partials(dir.path()).empty());
}
