#ifndef DDM_RESULT_MAP_HPP
#define DDM_RESULT_MAP_HPP

#include "ddm/spectrum.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace ddm {

/*!
    Structure function maps for a set of lags. Values are stored lag-major;
    each lag holds one half-plane of height x (width/2 + 1) coefficients in
    row-major order, matching the spatial transform layout. When a
    wave-vector cutoff was applied, coefficients outside it are zero.
 */
struct ResultMap {
    std::int64_t width = 0;
    std::int64_t height = 0;
    double frame_interval = 1.0;
    std::vector<std::int64_t> lags; // ascending, unique
    std::vector<double> values;

    std::int64_t plane_size() const { return height * half_cols(width); }

    std::span<double> lag_plane(std::int64_t i) {
        return {values.data() + i * plane_size(), static_cast<std::size_t>(plane_size())};
    }
    std::span<const double> lag_plane(std::int64_t i) const {
        return {values.data() + i * plane_size(), static_cast<std::size_t>(plane_size())};
    }

    /// Position of a lag value in lags, or -1.
    std::int64_t lag_index(std::int64_t lag) const;
};

/// Shapes, lag lists and frame intervals all equal.
bool same_layout(const ResultMap& a, const ResultMap& b);

/// Largest absolute elementwise difference; layouts must match.
double max_abs_difference(const ResultMap& a, const ResultMap& b);

/// Sorts ascending, rejects duplicates and lags outside [0, frames-1].
std::vector<std::int64_t> normalize_lags(std::vector<std::int64_t> lags, std::int64_t frames);

/// All lags 0..frames-1.
std::vector<std::int64_t> all_lags(std::int64_t frames);

/// Powers of two 1, 2, 4, ... below frames, plus frames-1.
std::vector<std::int64_t> log_lags(std::int64_t frames);

} // namespace ddm

#endif
