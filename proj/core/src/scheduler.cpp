#include "ddm/scheduler.hpp"

#include "ddm/errors.hpp"
#include "ddm/fft.hpp"
#include "ddm/pairwise.hpp"
#include "ddm/parallel.hpp"
#include "ddm/spectrum.hpp"
#include "ddm/temporal.hpp"
#include "ddm/timing.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstring>
#include <mutex>

#include <unistd.h>

namespace ddm {

namespace {

// frames read and transformed per dispatch; bounds the pixel staging
// buffer, not the planned bulk memory
constexpr std::int64_t kBatchFrames = 16;

std::filesystem::path make_temp_dir() {
    static std::atomic<std::uint64_t> counter{0};
    const auto base = std::filesystem::temp_directory_path();
    const auto pid = static_cast<std::uint64_t>(::getpid());
    for (;;) {
        const auto candidate =
            base / ("ddm-run-" + std::to_string(pid) + "-" +
                    std::to_string(counter.fetch_add(1)));
        std::error_code ec;
        if (std::filesystem::create_directory(candidate, ec))
            return candidate;
        if (ec)
            throw IoError("cannot create temp workspace " + candidate.string());
    }
}

struct TempDirGuard {
    std::filesystem::path path;
    bool active = false;

    ~TempDirGuard() {
        if (active) {
            std::error_code ec;
            std::filesystem::remove_all(path, ec);
        }
    }
};

std::vector<std::int64_t> flatten(const WaveVectorSet& wv) {
    std::vector<std::int64_t> flat(static_cast<std::size_t>(wv.count()));
    for (std::int64_t k = 0; k < wv.count(); ++k)
        flat[static_cast<std::size_t>(k)] = wv.flat(k);
    return flat;
}

template <typename Scalar>
void run_with_ft(FrameSource& source, const RunConfig& config, const WaveVectorSet& wv,
                 const std::vector<std::int64_t>& lags,
                 const std::filesystem::path& workspace, ResultArchive& archive,
                 TimingBreakdown& timing) {
    const int width = source.width();
    const int height = source.height();
    const int n_frames = source.frames();
    const std::int64_t ppf = source.pixels_per_frame();
    const std::int64_t q_count = wv.count();

    const MemoryBudget budget{config.memory_bytes, config.precision};
    // validity floor: one spectrum frame plus one padded scratch buffer
    // must fit before group capacity is even worth computing
    const std::int64_t floor_bytes =
        spectrum_bytes(width, height, config.precision) +
        pad_length(n_frames) * budget.complex_size();
    if (budget.bytes < floor_bytes)
        throw PlanError("memory budget " + std::to_string(budget.bytes) +
                        " bytes is below the working minimum of " +
                        std::to_string(floor_bytes) + " bytes");
    const GroupPlan plan = plan_with_ft(q_count, n_frames, budget);
    const auto flat = flatten(wv);

    PhaseClock clock;
    std::vector<std::uint16_t> pixels(static_cast<std::size_t>(kBatchFrames * ppf));

    for (std::size_t gi = 0; gi < plan.groups.size(); ++gi) {
        const auto [g_begin, g_end] = plan.groups[gi];
        const std::int64_t g_size = g_end - g_begin;
        std::vector<std::complex<Scalar>> seq(
            static_cast<std::size_t>(g_size * n_frames));

        std::vector<SpatialTransform<Scalar>> transforms;
        transforms.reserve(static_cast<std::size_t>(config.workers));
        for (int w = 0; w < config.workers; ++w)
            transforms.emplace_back(width, height);

        for (std::int64_t f0 = 0; f0 < n_frames; f0 += kBatchFrames) {
            const std::int64_t f1 = std::min<std::int64_t>(f0 + kBatchFrames, n_frames);

            clock.start();
            for (std::int64_t n = f0; n < f1; ++n)
                source.read_frame(static_cast<int>(n),
                                  {pixels.data() + (n - f0) * ppf,
                                   static_cast<std::size_t>(ppf)});
            clock.stop(timing.disk);

            clock.start();
            parallel_blocks(f0, f1, config.workers,
                            [&](int w, std::int64_t b, std::int64_t e) {
                auto& fft = transforms[static_cast<std::size_t>(w)];
                for (std::int64_t n = b; n < e; ++n) {
                    auto in = fft.input();
                    const std::uint16_t* px = pixels.data() + (n - f0) * ppf;
                    for (std::int64_t i = 0; i < ppf; ++i)
                        in[static_cast<std::size_t>(i)] =
                            static_cast<Scalar>(px[i]);
                    fft.run();
                    const auto out = fft.output();
                    // transpose this frame into the group's sequences
                    for (std::int64_t j = 0; j < g_size; ++j)
                        seq[static_cast<std::size_t>(j * n_frames + n)] =
                            out[static_cast<std::size_t>(
                                flat[static_cast<std::size_t>(g_begin + j)])];
                }
            });
            archive.counters.spatial_ffts += static_cast<std::uint64_t>(f1 - f0);
            clock.stop(timing.step1);
        }

        PartialResult partial;
        partial.group = static_cast<std::int64_t>(gi);
        partial.wv_begin = g_begin;
        partial.wv_end = g_end;
        partial.width = width;
        partial.height = height;
        partial.frames = n_frames;
        partial.frame_interval = source.frame_interval();
        partial.q_max = config.q_max;
        partial.lags = lags;
        partial.values.assign(lags.size() * static_cast<std::size_t>(g_size), 0.0);

        clock.start();
        std::mutex counter_mutex;
        std::uint64_t temporal = 0;
        parallel_blocks(0, g_size, config.workers,
                        [&](int, std::int64_t b, std::int64_t e) {
            SequenceEngine<Scalar> engine(n_frames);
            for (std::int64_t j = b; j < e; ++j) {
                const std::span<const std::complex<Scalar>> s(
                    seq.data() + j * n_frames, static_cast<std::size_t>(n_frames));
                const LagProfile profile = engine.with_ft(s);
                for (std::size_t li = 0; li < lags.size(); ++li) {
                    const std::int64_t m = lags[li];
                    // d(0) is zero by definition; drop the round-off dust
                    partial.values[li * static_cast<std::size_t>(g_size) +
                                   static_cast<std::size_t>(j)] =
                        m == 0 ? 0.0 : profile.d[static_cast<std::size_t>(m)];
                }
            }
            const std::scoped_lock lock(counter_mutex);
            temporal += engine.temporal_fft_count();
        });
        archive.counters.temporal_ffts += temporal;
        clock.stop(timing.step2);

        clock.start();
        write_partial(partial, workspace);
        clock.stop(timing.merge);
    }

    if (config.before_merge)
        config.before_merge(workspace);

    clock.start();
    archive.map = merge_partials(list_partials(workspace));
    clock.stop(timing.merge);
}

template <typename Scalar>
void run_without_ft(FrameSource& source, const RunConfig& config, const WaveVectorSet& wv,
                    const std::vector<std::int64_t>& lags, ResultArchive& archive,
                    TimingBreakdown& timing) {
    const int width = source.width();
    const int height = source.height();
    const int n_frames = source.frames();
    const std::int64_t plane = static_cast<std::int64_t>(height) * half_cols(width);
    const std::int64_t ppf = source.pixels_per_frame();
    const std::int64_t q_count = wv.count();

    const MemoryBudget budget{config.memory_bytes, config.precision};
    const ChunkPlan plan =
        plan_without_ft(n_frames, lags, budget, spectrum_bytes(width, height,
                                                              config.precision));
    const auto flat = flatten(wv);

    PhaseClock clock;
    std::vector<std::uint16_t> pixels(static_cast<std::size_t>(kBatchFrames * ppf));
    std::vector<std::complex<Scalar>> batch_spectra(
        static_cast<std::size_t>(kBatchFrames * plane));

    for (const LagChunk& chunk : plan.chunks) {
        // the window must reach back to the largest lag of the chunk so
        // every difference uses spectra transformed once this pass
        const std::int64_t cap = chunk.hi + 1;
        std::vector<std::complex<Scalar>> ring(static_cast<std::size_t>(cap * plane));
        std::vector<std::vector<double>> acc(
            chunk.lags.size(), std::vector<double>(static_cast<std::size_t>(q_count)));

        std::vector<SpatialTransform<Scalar>> transforms;
        transforms.reserve(static_cast<std::size_t>(config.workers));
        for (int w = 0; w < config.workers; ++w)
            transforms.emplace_back(width, height);

        for (std::int64_t f0 = 0; f0 < n_frames; f0 += kBatchFrames) {
            const std::int64_t f1 = std::min<std::int64_t>(f0 + kBatchFrames, n_frames);

            clock.start();
            for (std::int64_t n = f0; n < f1; ++n)
                source.read_frame(static_cast<int>(n),
                                  {pixels.data() + (n - f0) * ppf,
                                   static_cast<std::size_t>(ppf)});
            clock.stop(timing.disk);

            clock.start();
            parallel_blocks(f0, f1, config.workers,
                            [&](int w, std::int64_t b, std::int64_t e) {
                auto& fft = transforms[static_cast<std::size_t>(w)];
                for (std::int64_t n = b; n < e; ++n) {
                    auto in = fft.input();
                    const std::uint16_t* px = pixels.data() + (n - f0) * ppf;
                    for (std::int64_t i = 0; i < ppf; ++i)
                        in[static_cast<std::size_t>(i)] =
                            static_cast<Scalar>(px[i]);
                    fft.run();
                    std::copy(fft.output().begin(), fft.output().end(),
                              batch_spectra.begin() + (n - f0) * plane);
                }
            });
            archive.counters.spatial_ffts += static_cast<std::uint64_t>(f1 - f0);
            clock.stop(timing.step1);

            clock.start();
            for (std::int64_t n = f0; n < f1; ++n) {
                std::copy(batch_spectra.begin() + (n - f0) * plane,
                          batch_spectra.begin() + (n - f0 + 1) * plane,
                          ring.begin() + (n % cap) * plane);
                parallel_blocks(0, q_count, config.workers,
                                [&](int, std::int64_t a, std::int64_t b) {
                    const std::span<const std::int64_t> tile(
                        flat.data() + a, static_cast<std::size_t>(b - a));
                    const std::span<const std::complex<Scalar>> later(
                        ring.data() + (n % cap) * plane,
                        static_cast<std::size_t>(plane));
                    for (std::size_t li = 0; li < chunk.lags.size(); ++li) {
                        const std::int64_t m = chunk.lags[li];
                        if (m > n)
                            continue;
                        const std::span<const std::complex<Scalar>> earlier(
                            ring.data() + ((n - m) % cap) * plane,
                            static_cast<std::size_t>(plane));
                        accumulate_difference<Scalar>(
                            earlier, later, tile,
                            {acc[li].data() + a, static_cast<std::size_t>(b - a)});
                    }
                });
            }
            clock.stop(timing.step2);
        }

        clock.start();
        for (std::size_t li = 0; li < chunk.lags.size(); ++li) {
            const std::int64_t m = chunk.lags[li];
            const std::int64_t gi = archive.map.lag_index(m);
            auto plane_out = archive.map.lag_plane(gi);
            const double scale = 1.0 / static_cast<double>(n_frames - m);
            for (std::int64_t j = 0; j < q_count; ++j)
                plane_out[static_cast<std::size_t>(flat[static_cast<std::size_t>(j)])] =
                    acc[li][static_cast<std::size_t>(j)] * scale;
            archive.counters.pairs += static_cast<std::uint64_t>(n_frames - m);
        }
        clock.stop(timing.step2);
    }
}

void run_direct(FrameSource& source, const RunConfig& config, const WaveVectorSet& wv,
                const std::vector<std::int64_t>& lags, ResultArchive& archive,
                TimingBreakdown& timing) {
    PhaseClock clock;

    clock.start();
    ImageStack stack;
    stack.width = source.width();
    stack.height = source.height();
    stack.frames = source.frames();
    stack.frame_interval = source.frame_interval();
    stack.pixels.resize(static_cast<std::size_t>(stack.frames) *
                        static_cast<std::size_t>(stack.pixels_per_frame()));
    for (int n = 0; n < stack.frames; ++n)
        source.read_frame(n, stack.frame(n));
    clock.stop(timing.disk);

    clock.start();
    RunCounters counters;
    ResultMap map = direct_eq1(stack, lags, &counters);
    if (config.q_max) {
        std::vector<char> keep(static_cast<std::size_t>(map.plane_size()), 0);
        for (std::int64_t k = 0; k < wv.count(); ++k)
            keep[static_cast<std::size_t>(wv.flat(k))] = 1;
        for (std::size_t li = 0; li < map.lags.size(); ++li) {
            auto plane = map.lag_plane(static_cast<std::int64_t>(li));
            for (std::size_t i = 0; i < plane.size(); ++i)
                if (!keep[i])
                    plane[i] = 0.0;
        }
    }
    archive.map = std::move(map);
    archive.counters += counters;
    clock.stop(timing.step2);
}

} // namespace

Algorithm parse_algorithm(const std::string& name) {
    if (name == "with_ft")
        return Algorithm::WithFt;
    if (name == "without_ft")
        return Algorithm::WithoutFt;
    if (name == "direct")
        return Algorithm::Direct;
    throw InputError("unknown algorithm '" + name + "'");
}

Precision parse_precision(const std::string& name) {
    if (name == "f32")
        return Precision::F32;
    if (name == "f64")
        return Precision::F64;
    throw InputError("unknown precision '" + name + "'");
}

std::string to_string(Algorithm algorithm) {
    switch (algorithm) {
    case Algorithm::WithFt: return "with_ft";
    case Algorithm::WithoutFt: return "without_ft";
    case Algorithm::Direct: return "direct";
    }
    return "?";
}

std::string to_string(Precision precision) {
    return precision == Precision::F32 ? "f32" : "f64";
}

std::int64_t bytes_per_complex(Precision precision) {
    return precision == Precision::F32 ? 8 : 16;
}

std::int64_t spectrum_bytes(std::int64_t width, std::int64_t height, Precision precision) {
    return height * (width / 2 + 1) * bytes_per_complex(precision);
}

GroupPlan plan_with_ft(std::int64_t q_count, std::int64_t frames,
                       const MemoryBudget& budget) {
    if (frames < 1)
        throw InputError("plan_with_ft: frame count must be at least 1");
    if (q_count < 1)
        throw InputError("plan_with_ft: empty wave-vector set");

    const std::int64_t per_sequence = frames * budget.complex_size();
    const std::int64_t capacity = budget.bytes > 0 ? budget.bytes / per_sequence : 0;
    if (capacity < 1)
        throw PlanError("memory budget " + std::to_string(budget.bytes) +
                        " bytes cannot hold one " + std::to_string(frames) +
                        "-frame sequence (" + std::to_string(per_sequence) + " bytes)");

    GroupPlan plan;
    plan.capacity = capacity;
    for (std::int64_t b = 0; b < q_count; b += capacity)
        plan.groups.emplace_back(b, std::min(b + capacity, q_count));
    return plan;
}

ChunkPlan plan_without_ft(std::int64_t frames, std::vector<std::int64_t> lags,
                          const MemoryBudget& budget, std::int64_t bytes_per_spectrum) {
    if (bytes_per_spectrum < 1)
        throw InputError("plan_without_ft: bad spectrum size");
    lags = normalize_lags(std::move(lags), frames);

    const std::int64_t capacity = budget.bytes > 0 ? budget.bytes / bytes_per_spectrum : 0;
    if (capacity < 2)
        throw PlanError("memory budget " + std::to_string(budget.bytes) +
                        " bytes admits fewer than two " +
                        std::to_string(bytes_per_spectrum) + "-byte spectra");

    ChunkPlan plan;
    plan.capacity = capacity;
    const std::int64_t width = capacity - 1; // lags per pass
    for (const std::int64_t lag : lags) {
        if (lag == 0)
            continue; // zero by definition, never scheduled
        if (plan.chunks.empty() || lag > plan.chunks.back().lo + width - 1) {
            plan.chunks.push_back({lag, lag, {}});
        }
        plan.chunks.back().hi = lag;
        plan.chunks.back().lags.push_back(lag);
    }
    return plan;
}

ResultArchive run(FrameSource& source, const RunConfig& config) {
    const auto wall_start = std::chrono::steady_clock::now();
    if (config.workers < 1)
        throw InputError("workers must be at least 1");
    if (source.frames() < 1)
        throw InputError("stack has no frames");

    const int width = source.width();
    const int height = source.height();
    const int n_frames = source.frames();
    const std::vector<std::int64_t> lags =
        config.lags.empty() ? all_lags(n_frames) : normalize_lags(config.lags, n_frames);
    if (lags.empty())
        throw InputError("no lags");

    const WaveVectorSet wv = cutoff_set(width, height, config.q_max);
    if (wv.count() < 1)
        throw InputError("wave-vector cutoff retains nothing");

    ResultArchive archive;
    archive.frames = n_frames;
    archive.algorithm = to_string(config.algorithm);
    archive.precision =
        config.algorithm == Algorithm::Direct ? "f64" : to_string(config.precision);
    archive.q_max = config.q_max;
    archive.workers = config.workers;
    archive.map.width = width;
    archive.map.height = height;
    archive.map.frame_interval = source.frame_interval();
    archive.map.lags = lags;
    archive.map.values.assign(
        static_cast<std::size_t>(archive.map.plane_size()) * lags.size(), 0.0);

    TempDirGuard temp_guard;
    std::filesystem::path workspace = config.out_dir;
    if (workspace.empty()) {
        workspace = make_temp_dir();
        temp_guard.path = workspace;
        temp_guard.active = true;
    } else {
        std::error_code ec;
        std::filesystem::create_directories(workspace, ec);
        if (ec)
            throw IoError("cannot create workspace " + workspace.string());
    }

    TimingBreakdown timing;
    switch (config.algorithm) {
    case Algorithm::WithFt:
        if (config.precision == Precision::F32)
            run_with_ft<float>(source, config, wv, lags, workspace, archive, timing);
        else
            run_with_ft<double>(source, config, wv, lags, workspace, archive, timing);
        break;
    case Algorithm::WithoutFt:
        if (config.precision == Precision::F32)
            run_without_ft<float>(source, config, wv, lags, archive, timing);
        else
            run_without_ft<double>(source, config, wv, lags, archive, timing);
        break;
    case Algorithm::Direct:
        run_direct(source, config, wv, lags, archive, timing);
        break;
    }

    const auto wall_end = std::chrono::steady_clock::now();
    timing.finish(std::chrono::duration<double>(wall_end - wall_start).count());
    archive.timing = timing;
    archive.validate();
    return archive;
}

ResultMap merge_partials(const std::vector<std::filesystem::path>& files) {
    if (files.empty())
        throw InputError("no partial files to merge");

    std::vector<PartialResult> parts;
    parts.reserve(files.size());
    for (const auto& file : files)
        parts.push_back(read_partial(file));

    const PartialResult& first = parts.front();
    for (const PartialResult& p : parts) {
        if (p.width != first.width || p.height != first.height ||
            p.frames != first.frames || p.frame_interval != first.frame_interval ||
            p.q_max != first.q_max || p.lags != first.lags)
            throw InputError("partial files disagree on geometry or lags");
    }

    std::sort(parts.begin(), parts.end(),
              [](const PartialResult& a, const PartialResult& b) {
                  return a.wv_begin < b.wv_begin;
              });

    const WaveVectorSet wv =
        cutoff_set(static_cast<int>(first.width), static_cast<int>(first.height),
                   first.q_max);
    std::int64_t cursor = 0;
    for (const PartialResult& p : parts) {
        if (p.wv_begin < cursor)
            throw InputError("partial files overlap at wave vector " +
                             std::to_string(p.wv_begin));
        if (p.wv_begin > cursor)
            throw InputError("partial files leave a gap before wave vector " +
                             std::to_string(p.wv_begin));
        cursor = p.wv_end;
    }
    if (cursor != wv.count())
        throw InputError("partial files cover " + std::to_string(cursor) + " of " +
                         std::to_string(wv.count()) + " wave vectors");

    ResultMap map;
    map.width = first.width;
    map.height = first.height;
    map.frame_interval = first.frame_interval;
    map.lags = first.lags;
    map.values.assign(static_cast<std::size_t>(map.plane_size()) * map.lags.size(), 0.0);

    for (const PartialResult& p : parts) {
        const auto span_count = static_cast<std::size_t>(p.wv_count());
        for (std::size_t li = 0; li < p.lags.size(); ++li) {
            auto plane = map.lag_plane(static_cast<std::int64_t>(li));
            const double* src = p.values.data() + li * span_count;
            for (std::size_t j = 0; j < span_count; ++j)
                plane[static_cast<std::size_t>(
                    wv.flat(p.wv_begin + static_cast<std::int64_t>(j)))] = src[j];
        }
    }
    return map;
}

} // namespace ddm
