#ifndef DDM_SCHEDULER_HPP
#define DDM_SCHEDULER_HPP

#include "ddm/archive.hpp"
#include "ddm/frame_source.hpp"
#include "ddm/result_map.hpp"

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace ddm {

enum class Algorithm { WithFt, WithoutFt, Direct };
enum class Precision { F32, F64 };

Algorithm parse_algorithm(const std::string& name);
Precision parse_precision(const std::string& name);
std::string to_string(Algorithm algorithm);
std::string to_string(Precision precision);

/// 8 bytes per f32 complex, 16 per f64 complex.
std::int64_t bytes_per_complex(Precision precision);

/// Bytes of one half-plane spectrum frame.
std::int64_t spectrum_bytes(std::int64_t width, std::int64_t height, Precision precision);

struct MemoryBudget {
    std::int64_t bytes = 0;
    Precision precision = Precision::F64;

    std::int64_t complex_size() const { return bytes_per_complex(precision); }
};

/*!
    Out-of-core plan for the FFT-in-time path: the retained wave-vector
    list is cut into contiguous groups of at most K sequences, where
    K = floor(bytes / (N * bytes_per_complex)). Only the N-length sequence
    storage is budgeted; padded per-worker scratch lives outside the bulk
    buffer.
 */
struct GroupPlan {
    std::int64_t capacity = 0; // K, sequences resident at once
    std::vector<std::pair<std::int64_t, std::int64_t>> groups; // [begin, end) slices

    std::int64_t group_count() const { return static_cast<std::int64_t>(groups.size()); }
};

GroupPlan plan_with_ft(std::int64_t q_count, std::int64_t frames, const MemoryBudget& budget);

/*!
    Out-of-core plan for the classical path: positive requested lags are
    partitioned into contiguous intervals [lo, hi] with hi - lo + 2 <= C,
    C = floor(bytes / spectrum_bytes). Each interval is one pass that
    re-streams and re-transforms every frame once, keeping a sliding
    window of recent spectra.
 */
struct LagChunk {
    std::int64_t lo = 0;
    std::int64_t hi = 0;
    std::vector<std::int64_t> lags; // requested lags inside [lo, hi]
};

struct ChunkPlan {
    std::int64_t capacity = 0; // C, spectra the budget admits at once
    std::vector<LagChunk> chunks;

    std::int64_t passes() const { return static_cast<std::int64_t>(chunks.size()); }
};

ChunkPlan plan_without_ft(std::int64_t frames, std::vector<std::int64_t> lags,
                          const MemoryBudget& budget, std::int64_t bytes_per_spectrum);

struct RunConfig {
    Algorithm algorithm = Algorithm::WithFt;
    Precision precision = Precision::F64;
    std::vector<std::int64_t> lags; // empty selects every lag 0..N-1
    std::optional<double> q_max;
    std::int64_t memory_bytes = 0;
    int workers = 2;

    /// Workspace for partial group files. Empty uses a throwaway temp
    /// directory; otherwise partials/ is left behind next to the results.
    std::filesystem::path out_dir;

    /// Test seam, invoked with the workspace directory after partials are
    /// written and before they are merged.
    std::function<void(const std::filesystem::path&)> before_merge;
};

/*!
    Two-step pipeline for any of the three algorithms. Step 1 loads and
    spatially transforms frames once per group or pass; step 2 runs the
    temporal engine per sequence (with_ft) or accumulates lag differences
    over a sliding spectrum window (without_ft). Group partials go to disk
    and are merged at the end. Final maps do not depend on the group or
    chunk boundaries, nor on the worker count (bitwise).

    The lag-0 plane is identically zero by definition and is emitted as
    exact zeros.
 */
ResultArchive run(FrameSource& source, const RunConfig& config);

/// Scatter self-describing group partials into full half-plane maps.
/// Headers must agree on geometry and lags and must cover the retained
/// wave-vector list exactly once; gaps and overlaps are errors.
ResultMap merge_partials(const std::vector<std::filesystem::path>& files);

} // namespace ddm

#endif
