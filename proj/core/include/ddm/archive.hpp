#ifndef DDM_ARCHIVE_HPP
#define DDM_ARCHIVE_HPP

#include "ddm/result_map.hpp"
#include "ddm/timing.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace ddm {

/*!
    Persistent results: one binary map per lag (d_m<lag>.bin, 64-bit
    little-endian floats, row-major half-plane) plus an index.json
    manifest. Map files and all manifest sections except "timing" are
    byte-stable across identical runs; wall-clock seconds live only in
    the timing section.
 */
struct ResultArchive {
    ResultMap map;
    std::int64_t frames = 0;
    std::string algorithm;  // with_ft | without_ft | direct
    std::string precision;  // f32 | f64
    std::optional<double> q_max;
    int workers = 0;
    RunCounters counters;
    TimingBreakdown timing;

    /// Maps must be finite and not dip below -1e-9 relative to the peak.
    void validate() const;
};

/// Writes map files + manifest into out_dir (created if absent).
/// Returns the manifest path. Empty lag list is rejected.
std::filesystem::path write_results(const ResultArchive& archive,
                                    const std::filesystem::path& out_dir);

ResultArchive read_results(const std::filesystem::path& dir);

/*!
    One group's values for a contiguous slice [wv_begin, wv_end) of the
    retained wave-vector list, every requested lag. The header line makes
    the file self-describing so merging needs no external bookkeeping.
 */
struct PartialResult {
    std::int64_t group = 0;
    std::int64_t wv_begin = 0;
    std::int64_t wv_end = 0;
    std::int64_t width = 0;
    std::int64_t height = 0;
    std::int64_t frames = 0;
    double frame_interval = 1.0;
    std::optional<double> q_max;
    std::vector<std::int64_t> lags;
    std::vector<double> values; // lag-major, wv_end - wv_begin per lag

    std::int64_t wv_count() const { return wv_end - wv_begin; }
};

/// partials/group<k>.bin under out_dir; directory created if absent.
std::filesystem::path write_partial(const PartialResult& partial,
                                    const std::filesystem::path& out_dir);

PartialResult read_partial(const std::filesystem::path& file);

/// group*.bin files in dir/partials, sorted by group number.
std::vector<std::filesystem::path> list_partials(const std::filesystem::path& out_dir);

} // namespace ddm

#endif
