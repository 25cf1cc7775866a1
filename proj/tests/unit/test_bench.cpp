#include <doctest.h>

#include "test_helpers.hpp"

#include <ddm/bench.hpp>
#include <ddm/errors.hpp>

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

using namespace ddm;
using ddmtest::TempDir;

namespace {

SweepSpec tiny_spec()
{
    SweepSpec spec;
    spec.frame_counts = {8, 16};
    spec.sizes = {8};
    spec.algorithms = {Algorithm::WithFt, Algorithm::WithoutFt};
    spec.repetitions = 1;
    spec.warmup = 0;
    return spec;
}

const BenchCell* find_cell(const std::vector<BenchCell>& table,
                           const std::string& algorithm, int frames)
{
    for (const auto& cell : table)
        if (cell.algorithm == algorithm && cell.frames == frames)
            return &cell;
    return nullptr;
}

BenchCell stub_cell(const std::string& algorithm, int frames, int size, double total)
{
    BenchCell cell;
    cell.algorithm = algorithm;
    cell.frames = frames;
    cell.width = size;
    cell.height = size;
    cell.workers = 2;
    cell.seconds_total = total;
    return cell;
}

} // namespace

TEST_CASE("sweep covers the full cell grid")
{
    const auto table = sweep(tiny_spec(), synthetic_stack_factory());
    REQUIRE_EQ(table.size(), 4);
    for (const auto& cell : table) {
        CHECK(!cell.failed);
        CHECK_GT(cell.seconds_total, 0.0);
        CHECK_EQ(cell.workers, 2);
    }
    CHECK(find_cell(table, "with_ft", 8) != nullptr);
    CHECK(find_cell(table, "without_ft", 16) != nullptr);
}

TEST_CASE("counters are deterministic and scale correctly")
{
    auto spec = tiny_spec();
    spec.frame_counts = {256, 512};
    const auto table = sweep(spec, synthetic_stack_factory());

    const auto* p256 = find_cell(table, "without_ft", 256);
    const auto* p512 = find_cell(table, "without_ft", 512);
    REQUIRE(p256 != nullptr);
    REQUIRE(p512 != nullptr);
    CHECK_EQ(p256->counters.pairs, std::uint64_t{256} * 255 / 2);
    CHECK_EQ(p512->counters.pairs, std::uint64_t{512} * 511 / 2);
    const double ratio = static_cast<double>(p512->counters.pairs) /
                         static_cast<double>(p256->counters.pairs);
    CHECK_GE(ratio, 3.9);
    CHECK_LE(ratio, 4.1);

    // single-group cells: two temporal transforms per retained wave vector
    const auto* f256 = find_cell(table, "with_ft", 256);
    REQUIRE(f256 != nullptr);
    CHECK_EQ(f256->groups_or_passes, 1);
    CHECK_EQ(f256->counters.temporal_ffts, std::uint64_t{2} * 8 * 5);
    CHECK_EQ(f256->counters.spatial_ffts, 256);
}

TEST_CASE("counters never shrink as frames grow")
{
    auto spec = tiny_spec();
    spec.frame_counts = {8, 16, 32};
    const auto table = sweep(spec, synthetic_stack_factory());
    for (const std::string algorithm : {"with_ft", "without_ft"}) {
        std::uint64_t prev_spatial = 0, prev_pairs = 0;
        for (const int frames : {8, 16, 32}) {
            const auto* cell = find_cell(table, algorithm, frames);
            REQUIRE(cell != nullptr);
            CHECK_GE(cell->counters.spatial_ffts, prev_spatial);
            CHECK_GE(cell->counters.pairs, prev_pairs);
            prev_spatial = cell->counters.spatial_ffts;
            prev_pairs = cell->counters.pairs;
        }
    }
}

TEST_CASE("crossover reports the first frame count that wins")
{
    std::vector<BenchCell> table;
    table.push_back(stub_cell("with_ft", 256, 32, 5.0));
    table.push_back(stub_cell("without_ft", 256, 32, 1.0));
    table.push_back(stub_cell("with_ft", 512, 32, 3.0));
    table.push_back(stub_cell("without_ft", 512, 32, 2.5));
    table.push_back(stub_cell("with_ft", 1024, 32, 2.0));
    table.push_back(stub_cell("without_ft", 1024, 32, 4.0));
    table.push_back(stub_cell("with_ft", 256, 64, 9.0));
    table.push_back(stub_cell("without_ft", 256, 64, 1.0));

    const auto results = crossover(table);
    REQUIRE_EQ(results.size(), 2);
    CHECK_EQ(results[0].size, 32);
    REQUIRE(results[0].n_star.has_value());
    CHECK_EQ(*results[0].n_star, 1024);
    CHECK_EQ(results[1].size, 64);
    CHECK(!results[1].n_star.has_value());
}

TEST_CASE("csv header is the stable contract")
{
    TempDir dir;
    std::vector<BenchCell> table{stub_cell("with_ft", 8, 8, 0.5)};
    const auto path = dir.path() / "bench.csv";
    write_bench_csv(table, path);

    std::ifstream in(path);
    std::string header;
    std::getline(in, header);
    CHECK_EQ(header,
             "algorithm,N,width,height,workers,budget_bytes,groups_or_passes,"
             "seconds_total,seconds_disk,seconds_step1,seconds_step2,seconds_merge,"
             "count_spatial_ffts,count_temporal_ffts,count_pairs");
    std::string row;
    std::getline(in, row);
    CHECK(row.rfind("with_ft,8,8,8,2,", 0) == 0);
}

TEST_CASE("guard rails reject oversized axes")
{
    auto spec = tiny_spec();
    spec.frame_counts = {1 << 20};
    CHECK_THROWS_AS(spec.validate(), InputError);

    spec = tiny_spec();
    spec.sizes = {4096};
    CHECK_THROWS_AS(spec.validate(), InputError);

    spec = tiny_spec();
    spec.repetitions = 0;
    CHECK_THROWS_AS(spec.validate(), InputError);

    spec = tiny_spec();
    spec.frame_counts.clear();
    CHECK_THROWS_AS(spec.validate(), InputError);
}

TEST_CASE("planning failures are recorded not fatal")
{
    auto spec = tiny_spec();
    spec.frame_counts = {8};
    spec.algorithms = {Algorithm::WithoutFt};
    spec.budgets = {1024}; // cannot hold even one spectrum
    const auto table = sweep(spec, synthetic_stack_factory());
    REQUIRE_EQ(table.size(), 1);
    CHECK(table[0].failed);
    CHECK(!table[0].error.empty());

    TempDir dir;
    const auto path = dir.path() / "bench.csv";
    write_bench_csv(table, path);
    std::ifstream in(path);
    std::string header, row;
    std::getline(in, header);
    std::getline(in, row);
    CHECK(row.find("nan") != std::string::npos);
}
