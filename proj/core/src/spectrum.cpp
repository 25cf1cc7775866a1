#include "ddm/spectrum.hpp"

#include "ddm/errors.hpp"
#include "ddm/fft.hpp"
#include "ddm/parallel.hpp"

#include <algorithm>
#include <mutex>

namespace ddm {

template <typename Scalar>
std::vector<std::complex<Scalar>> forward_spectrum(std::span<const Scalar> frame,
                                                   int width, int height)
{
    if (frame.size() != static_cast<std::size_t>(width) * height)
        throw InputError("forward_spectrum: frame size does not match dimensions");
    for (const Scalar v : frame)
        if (!std::isfinite(v))
            throw InputError("forward_spectrum: non-finite input value");

    SpatialTransform<Scalar> fft(width, height);
    std::copy(frame.begin(), frame.end(), fft.input().begin());
    fft.run();
    const auto out = fft.output();
    return {out.begin(), out.end()};
}

template <typename Scalar>
SpectrumStack<Scalar> compute_spectra(const FrameSource& source, int workers,
                                      RunCounters* counters)
{
    SpectrumStack<Scalar> stack;
    stack.width = source.width();
    stack.height = source.height();
    stack.frames = source.frames();
    stack.amplitudes.resize(static_cast<std::size_t>(stack.frames) * stack.plane_size());

    const std::int64_t plane = stack.plane_size();
    std::mutex counter_mutex;

    parallel_blocks(0, stack.frames, workers, [&](int, std::int64_t begin, std::int64_t end) {
        SpatialTransform<Scalar> fft(stack.width, stack.height);
        std::vector<std::uint16_t> pixels(static_cast<std::size_t>(source.pixels_per_frame()));
        std::uint64_t local_ffts = 0;
        for (std::int64_t n = begin; n < end; ++n) {
            source.read_frame(static_cast<int>(n), pixels);
            auto in = fft.input();
            for (std::size_t i = 0; i < pixels.size(); ++i)
                in[i] = static_cast<Scalar>(pixels[i]);
            fft.run();
            const auto out = fft.output();
            std::copy(out.begin(), out.end(),
                      stack.amplitudes.begin() + static_cast<std::size_t>(n * plane));
            ++local_ffts;
        }
        if (counters) {
            std::lock_guard<std::mutex> lock(counter_mutex);
            counters->spatial_ffts += local_ffts;
        }
    });
    return stack;
}

WaveVectorSet cutoff_set(int width, int height, std::optional<double> q_max)
{
    if (width < 1 || height < 1)
        throw InputError("cutoff_set: dimensions must be positive");
    if (q_max && *q_max < 0.0)
        throw InputError("cutoff_set: q_max must be non-negative");

    WaveVectorSet set;
    set.width = width;
    set.height = height;
    set.q_max = q_max;
    const int cols = half_cols(width);
    for (int row = 0; row < height; ++row) {
        for (int col = 0; col < cols; ++col) {
            if (!q_max || q_magnitude(row, col, height) <= *q_max)
                set.indices.push_back({row, col});
        }
    }
    return set;
}

template std::vector<std::complex<float>>
forward_spectrum<float>(std::span<const float>, int, int);
template std::vector<std::complex<double>>
forward_spectrum<double>(std::span<const double>, int, int);
template SpectrumStack<float> compute_spectra<float>(const FrameSource&, int, RunCounters*);
template SpectrumStack<double> compute_spectra<double>(const FrameSource&, int, RunCounters*);

} // namespace ddm
