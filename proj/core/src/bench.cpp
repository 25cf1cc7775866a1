#include "ddm/bench.hpp"

#include "ddm/errors.hpp"
#include "ddm/result_map.hpp"
#include "ddm/spectrum.hpp"
#include "ddm/synth.hpp"

#include <algorithm>
#include <fstream>
#include <new>

namespace ddm {

namespace {

double median(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const std::size_t n = values.size();
    if (n % 2 == 1)
        return values[n / 2];
    return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

std::int64_t planned_units(Algorithm algorithm, int frames, int size,
                           std::int64_t budget) {
    const MemoryBudget mem{budget, Precision::F64};
    switch (algorithm) {
    case Algorithm::WithFt: {
        const std::int64_t q = static_cast<std::int64_t>(size) * (size / 2 + 1);
        return plan_with_ft(q, frames, mem).group_count();
    }
    case Algorithm::WithoutFt:
        return plan_without_ft(frames, all_lags(frames), mem,
                               spectrum_bytes(size, size, Precision::F64))
            .passes();
    case Algorithm::Direct:
        return 1;
    }
    return 1;
}

BenchCell run_cell(FrameSource& source, Algorithm algorithm, int workers,
                   std::int64_t budget, const SweepSpec& spec) {
    BenchCell cell;
    cell.algorithm = to_string(algorithm);
    cell.frames = source.frames();
    cell.width = source.width();
    cell.height = source.height();
    cell.workers = workers;
    cell.budget_bytes = budget;

    RunConfig config;
    config.algorithm = algorithm;
    config.precision = Precision::F64;
    config.memory_bytes = budget;
    config.workers = workers;

    try {
        cell.groups_or_passes =
            planned_units(algorithm, cell.frames, cell.width, budget);

        for (int i = 0; i < spec.warmup; ++i)
            run(source, config);

        std::vector<double> total;
        std::vector<double> disk;
        std::vector<double> step1;
        std::vector<double> step2;
        std::vector<double> merge;
        for (int i = 0; i < spec.repetitions; ++i) {
            const ResultArchive archive = run(source, config);
            total.push_back(archive.timing.total);
            disk.push_back(archive.timing.disk);
            step1.push_back(archive.timing.step1);
            step2.push_back(archive.timing.step2);
            merge.push_back(archive.timing.merge);
            cell.counters = archive.counters; // deterministic per cell
        }
        cell.seconds_total = median(std::move(total));
        cell.seconds_disk = median(std::move(disk));
        cell.seconds_step1 = median(std::move(step1));
        cell.seconds_step2 = median(std::move(step2));
        cell.seconds_merge = median(std::move(merge));
    } catch (const PlanError& e) {
        cell.failed = true;
        cell.error = e.what();
    } catch (const std::bad_alloc&) {
        cell.failed = true;
        cell.error = "out of memory";
    }
    return cell;
}

} // namespace

void SweepSpec::validate() const {
    if (frame_counts.empty() || sizes.empty() || algorithms.empty() ||
        worker_counts.empty())
        throw InputError("sweep: every axis needs at least one value");
    if (repetitions < 1)
        throw InputError("sweep: repetitions must be at least 1");
    if (warmup < 0)
        throw InputError("sweep: warmup must be non-negative");
    for (const int n : frame_counts)
        if (n < 1 || n > max_frames)
            throw InputError("sweep: frame count " + std::to_string(n) +
                             " outside (0, " + std::to_string(max_frames) + "]");
    for (const int s : sizes)
        if (s < 1 || s > max_size)
            throw InputError("sweep: size " + std::to_string(s) + " outside (0, " +
                             std::to_string(max_size) + "]");
    for (const int w : worker_counts)
        if (w < 1)
            throw InputError("sweep: worker count must be at least 1");
    for (const std::int64_t b : budgets)
        if (b < 1)
            throw InputError("sweep: budget must be positive");
}

StackFactory synthetic_stack_factory() {
    return [](int frames, int size) -> std::shared_ptr<FrameSource> {
        SynthConfig config;
        config.width = size;
        config.height = size;
        config.frames = frames;
        config.particles = 100;
        config.diffusion = 0.5;
        config.seed = (static_cast<std::uint64_t>(frames) << 32) ^
                      static_cast<std::uint64_t>(size);
        return std::make_shared<MemoryFrameSource>(generate(config));
    };
}

std::vector<BenchCell> sweep(const SweepSpec& spec, const StackFactory& factory) {
    spec.validate();
    const std::vector<std::int64_t> budgets =
        spec.budgets.empty() ? std::vector<std::int64_t>{std::int64_t{2} << 30}
                             : spec.budgets;

    std::vector<BenchCell> table;
    for (const int size : spec.sizes)
        for (const int frames : spec.frame_counts) {
            const std::shared_ptr<FrameSource> source = factory(frames, size);
            for (const Algorithm algorithm : spec.algorithms)
                for (const int workers : spec.worker_counts)
                    for (const std::int64_t budget : budgets)
                        table.push_back(
                            run_cell(*source, algorithm, workers, budget, spec));
        }
    return table;
}

std::vector<CrossoverResult> crossover(std::span<const BenchCell> table) {
    std::vector<CrossoverResult> results;
    for (const BenchCell& cell : table) {
        if (std::any_of(results.begin(), results.end(),
                        [&](const CrossoverResult& r) { return r.size == cell.width; }))
            continue;
        results.push_back({cell.width, std::nullopt});
    }

    for (CrossoverResult& result : results) {
        std::vector<int> axis;
        for (const BenchCell& cell : table)
            if (cell.width == result.size &&
                std::find(axis.begin(), axis.end(), cell.frames) == axis.end())
                axis.push_back(cell.frames);
        std::sort(axis.begin(), axis.end());

        for (const int n : axis) {
            const BenchCell* with_ft = nullptr;
            const BenchCell* without_ft = nullptr;
            for (const BenchCell& cell : table) {
                if (cell.width != result.size || cell.frames != n || cell.failed)
                    continue;
                if (!with_ft && cell.algorithm == "with_ft")
                    with_ft = &cell;
                if (!without_ft && cell.algorithm == "without_ft")
                    without_ft = &cell;
            }
            if (with_ft && without_ft &&
                with_ft->seconds_total < without_ft->seconds_total) {
                result.n_star = n;
                break;
            }
        }
    }
    return results;
}

void write_bench_csv(std::span<const BenchCell> table,
                     const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << "algorithm,N,width,height,workers,budget_bytes,groups_or_passes,"
           "seconds_total,seconds_disk,seconds_step1,seconds_step2,seconds_merge,"
           "count_spatial_ffts,count_temporal_ffts,count_pairs\n";
    out.precision(9);
    for (const BenchCell& cell : table) {
        out << cell.algorithm << ',' << cell.frames << ',' << cell.width << ','
            << cell.height << ',' << cell.workers << ',' << cell.budget_bytes << ','
            << cell.groups_or_passes << ',';
        if (cell.failed) {
            out << "nan,nan,nan,nan,nan,0,0,0\n";
            continue;
        }
        out << cell.seconds_total << ',' << cell.seconds_disk << ','
            << cell.seconds_step1 << ',' << cell.seconds_step2 << ','
            << cell.seconds_merge << ',' << cell.counters.spatial_ffts << ','
            << cell.counters.temporal_ffts << ',' << cell.counters.pairs << '\n';
    }
    if (!out)
        throw IoError("write failed for " + path.string());
}

} // namespace ddm
