#ifndef DDM_BENCH_HPP
#define DDM_BENCH_HPP

#include "ddm/frame_source.hpp"
#include "ddm/scheduler.hpp"
#include "ddm/timing.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace ddm {

/*!
    Axes of a timing/counter sweep. Every combination of frame count,
    image size, algorithm, worker count and budget is one cell; each cell
    is run `warmup + repetitions` times and reported as the per-field
    median of the repetitions.
 */
struct SweepSpec {
    std::vector<int> frame_counts;
    std::vector<int> sizes; // square images
    std::vector<Algorithm> algorithms;
    std::vector<int> worker_counts{2};
    std::vector<std::int64_t> budgets; // empty = effectively unbounded
    int repetitions = 3;
    int warmup = 1;

    // guard rails; cells beyond these are rejected up front
    int max_frames = 65536;
    int max_size = 1024;

    void validate() const;
};

struct BenchCell {
    std::string algorithm;
    int frames = 0;
    int width = 0;
    int height = 0;
    int workers = 0;
    std::int64_t budget_bytes = 0;
    std::int64_t groups_or_passes = 0;
    double seconds_total = 0.0;
    double seconds_disk = 0.0;
    double seconds_step1 = 0.0;
    double seconds_step2 = 0.0;
    double seconds_merge = 0.0;
    RunCounters counters;
    bool failed = false;
    std::string error;
};

/// Produces the stack for one (frames, size) cell. Called once per
/// combination; the source is shared by every algorithm repetition.
using StackFactory =
    std::function<std::shared_ptr<FrameSource>(int frames, int size)>;

/// Synthetic Brownian stacks with a fixed seed per (frames, size).
StackFactory synthetic_stack_factory();

/// Cells run sequentially so each owns the machine. A cell that fails to
/// plan or allocate is recorded as failed and the sweep continues.
std::vector<BenchCell> sweep(const SweepSpec& spec, const StackFactory& factory);

/// Smallest N where the with_ft median total beats without_ft for one
/// image size; nullopt when it never does.
struct CrossoverResult {
    int size = 0;
    std::optional<int> n_star;
};

std::vector<CrossoverResult> crossover(std::span<const BenchCell> table);

/// bench.csv with one row per cell.
void write_bench_csv(std::span<const BenchCell> table,
                     const std::filesystem::path& path);

} // namespace ddm

#endif
