#ifndef DDM_SPECTRUM_HPP
#define DDM_SPECTRUM_HPP

#include "ddm/frame_source.hpp"
#include "ddm/timing.hpp"

#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace ddm {

inline int half_cols(int width) { return width / 2 + 1; }

/// Radial frequency index of a half-plane position: rows above H/2 map to
/// negative vertical frequencies, columns are non-negative by layout.
inline double q_magnitude(int row, int col, int height)
{
    const int q_row = row <= height / 2 ? row : row - height;
    return std::sqrt(static_cast<double>(q_row) * q_row + static_cast<double>(col) * col);
}

/// Per-frame half-plane spectra of a stack, frame-major. Unnormalized
/// forward transforms: the DC element of each frame equals its pixel sum.
template <typename Scalar>
struct SpectrumStack {
    int width = 0;
    int height = 0;
    int frames = 0;
    std::vector<std::complex<Scalar>> amplitudes; // frames x (height*half_cols)

    std::int64_t plane_size() const
    {
        return static_cast<std::int64_t>(height) * half_cols(width);
    }

    std::span<const std::complex<Scalar>> frame(int n) const
    {
        return {amplitudes.data() + static_cast<std::size_t>(n) * plane_size(),
                static_cast<std::size_t>(plane_size())};
    }
};

/// Ordered set of retained half-plane positions. Row-major sorted, unique;
/// the ordering defines the wave-vector index space used by group plans
/// and partial files.
struct WaveVector {
    int row = 0;
    int col = 0;
};

struct WaveVectorSet {
    int width = 0;
    int height = 0;
    std::optional<double> q_max; // absent = full half-plane
    std::vector<WaveVector> indices;

    std::int64_t count() const { return static_cast<std::int64_t>(indices.size()); }

    std::int64_t flat(std::int64_t k) const
    {
        return static_cast<std::int64_t>(indices[static_cast<std::size_t>(k)].row) *
                   half_cols(width) +
               indices[static_cast<std::size_t>(k)].col;
    }
};

/// Half-plane forward transform of one frame. Input values must be finite.
template <typename Scalar>
std::vector<std::complex<Scalar>> forward_spectrum(std::span<const Scalar> frame,
                                                   int width, int height);

/// Transforms every frame of the source; frames are split across workers.
/// Adds frames() to counters.spatial_ffts when counters is given.
template <typename Scalar>
SpectrumStack<Scalar> compute_spectra(const FrameSource& source, int workers,
                                      RunCounters* counters = nullptr);

/// Retains the half-plane positions with q_magnitude <= q_max, or the full
/// half-plane when q_max is absent.
WaveVectorSet cutoff_set(int width, int height, std::optional<double> q_max);

extern template std::vector<std::complex<float>>
forward_spectrum<float>(std::span<const float>, int, int);
extern template std::vector<std::complex<double>>
forward_spectrum<double>(std::span<const double>, int, int);
extern template SpectrumStack<float> compute_spectra<float>(const FrameSource&, int,
                                                            RunCounters*);
extern template SpectrumStack<double> compute_spectra<double>(const FrameSource&, int,
                                                              RunCounters*);

} // namespace ddm

#endif
