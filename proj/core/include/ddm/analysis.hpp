#ifndef DDM_ANALYSIS_HPP
#define DDM_ANALYSIS_HPP

#include "ddm/result_map.hpp"
#include "ddm/spectrum.hpp"

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

namespace ddm {

/*!
    d(q, m): map values averaged over retained wave vectors at equal
    integer radius round(sqrt(q_row^2 + col^2)). Each stored half-plane
    coefficient contributes once; counts depend on geometry only, so they
    are shared by all lags. Bins nobody populates carry mean 0 and count 0.
 */
struct RadialProfile {
    std::int64_t bin_count = 0;
    double frame_interval = 1.0;
    std::vector<std::int64_t> lags;
    std::vector<std::int64_t> counts; // per bin
    std::vector<double> means;        // lag-major, lags.size() x bin_count

    double mean(std::int64_t lag_index, std::int64_t bin) const {
        return means[static_cast<std::size_t>(lag_index * bin_count + bin)];
    }
};

RadialProfile azimuthal_average(const ResultMap& map, const WaveVectorSet& wave_vectors);

/*!
    Least-squares fit of d(q, m) = A * (1 - exp(-m dt / tau)) + B over the
    positive lags of one bin. Deterministic initialization and a bounded
    Levenberg-Marquardt refinement in (A, B, ln tau); never throws on bad
    data, it flags instead.
 */
struct ExponentialFit {
    enum class Flag { Ok, Degenerate, NoConverge };

    std::int64_t q_bin = 0;
    double amplitude = 0.0;
    double baseline = 0.0;
    double tau = 0.0; // seconds, always > 0
    double residual = 0.0;
    Flag flag = Flag::Ok;
};

std::string to_string(ExponentialFit::Flag flag);

ExponentialFit fit_exponential(const RadialProfile& profile, std::int64_t q_bin);

/// Fits every bin with at least 4 usable lags.
std::vector<ExponentialFit> fit_all_bins(const RadialProfile& profile);

/*!
    Through-origin regression of 1/tau against q_phys^2 with
    q_phys = 2 pi q / width, over Ok-flagged fits with q_bin in
    [q_lo, q_hi]. For Brownian motion the slope is the diffusion
    coefficient.
 */
struct DiffusionEstimate {
    double coefficient = 0.0; // pixel^2 per second
    std::int64_t bins_used = 0;
};

DiffusionEstimate estimate_diffusion(std::span<const ExponentialFit> fits,
                                     std::int64_t width, std::int64_t q_lo,
                                     std::int64_t q_hi);

/// radial.csv: lag, q_bin, mean, count (populated bins only).
void write_radial_csv(const RadialProfile& profile, const std::filesystem::path& path);

/// fits.csv: q_bin, A, B, tau_seconds, residual, flag.
void write_fits_csv(std::span<const ExponentialFit> fits,
                    const std::filesystem::path& path);

} // namespace ddm

#endif
