#include "ddm/pairwise.hpp"

#include "ddm/errors.hpp"
#include "ddm/fft.hpp"
#include "ddm/parallel.hpp"

#include <algorithm>

namespace ddm {

template <typename Scalar>
void accumulate_difference(std::span<const std::complex<Scalar>> earlier,
                           std::span<const std::complex<Scalar>> later,
                           std::span<const std::int64_t> idx, std::span<double> acc) {
    for (std::size_t j = 0; j < idx.size(); ++j) {
        const auto k = static_cast<std::size_t>(idx[j]);
        const double re = static_cast<double>(earlier[k].real()) -
                          static_cast<double>(later[k].real());
        const double im = static_cast<double>(earlier[k].imag()) -
                          static_cast<double>(later[k].imag());
        acc[j] += re * re + im * im;
    }
}

template <typename Scalar>
ResultMap without_ft(const SpectrumStack<Scalar>& spectra, std::vector<std::int64_t> lags,
                     const WaveVectorSet& wave_vectors, int workers,
                     RunCounters* counters) {
    if (wave_vectors.width != spectra.width || wave_vectors.height != spectra.height)
        throw InputError("without_ft: wave-vector set does not match spectra");
    lags = normalize_lags(std::move(lags), spectra.frames);

    ResultMap out;
    out.width = spectra.width;
    out.height = spectra.height;
    out.lags = lags;
    out.values.assign(static_cast<std::size_t>(out.plane_size()) * lags.size(), 0.0);

    const std::int64_t n_frames = spectra.frames;
    const std::int64_t q_count = wave_vectors.count();
    std::vector<std::int64_t> flat(static_cast<std::size_t>(q_count));
    for (std::int64_t k = 0; k < q_count; ++k)
        flat[static_cast<std::size_t>(k)] = wave_vectors.flat(k);

    parallel_blocks(0, q_count, workers, [&](int, std::int64_t j0, std::int64_t j1) {
        const std::span<const std::int64_t> tile(flat.data() + j0,
                                                 static_cast<std::size_t>(j1 - j0));
        std::vector<double> acc(tile.size());
        for (std::size_t li = 0; li < lags.size(); ++li) {
            const std::int64_t m = lags[li];
            if (m == 0)
                continue;
            std::fill(acc.begin(), acc.end(), 0.0);
            for (std::int64_t n = m; n < n_frames; ++n)
                accumulate_difference<Scalar>(spectra.frame(static_cast<int>(n - m)),
                                              spectra.frame(static_cast<int>(n)), tile, acc);
            auto plane = out.lag_plane(static_cast<std::int64_t>(li));
            const double scale = 1.0 / static_cast<double>(n_frames - m);
            for (std::size_t j = 0; j < tile.size(); ++j)
                plane[static_cast<std::size_t>(tile[j])] = acc[j] * scale;
        }
    });

    if (counters) {
        std::uint64_t pair_count = 0;
        for (const std::int64_t m : lags)
            if (m > 0)
                pair_count += static_cast<std::uint64_t>(n_frames - m);
        counters->pairs += pair_count;
    }
    return out;
}

ResultMap direct_eq1(const ImageStack& stack, std::vector<std::int64_t> lags,
                     RunCounters* counters) {
    stack.validate();
    lags = normalize_lags(std::move(lags), stack.frames);

    ResultMap out;
    out.width = stack.width;
    out.height = stack.height;
    out.frame_interval = stack.frame_interval;
    out.lags = lags;
    out.values.assign(static_cast<std::size_t>(out.plane_size()) * lags.size(), 0.0);

    SpatialTransform<double> fft(stack.width, stack.height);
    const auto pixels = static_cast<std::size_t>(stack.pixels_per_frame());
    std::uint64_t transforms = 0;

    for (std::size_t li = 0; li < lags.size(); ++li) {
        const std::int64_t m = lags[li];
        if (m == 0)
            continue;
        auto plane = out.lag_plane(static_cast<std::int64_t>(li));
        for (std::int64_t n = m; n < stack.frames; ++n) {
            const auto a = stack.frame(static_cast<int>(n - m));
            const auto b = stack.frame(static_cast<int>(n));
            auto in = fft.input();
            for (std::size_t i = 0; i < pixels; ++i)
                in[i] = static_cast<double>(a[i]) - static_cast<double>(b[i]);
            fft.run();
            ++transforms;
            const auto spec = fft.output();
            for (std::size_t k = 0; k < spec.size(); ++k)
                plane[k] += std::norm(spec[k]);
        }
        const double scale = 1.0 / static_cast<double>(stack.frames - m);
        for (auto& v : plane)
            v *= scale;
    }

    if (counters) {
        counters->spatial_ffts += transforms;
        counters->pairs += transforms;
    }
    return out;
}

template void accumulate_difference<float>(std::span<const std::complex<float>>,
                                           std::span<const std::complex<float>>,
                                           std::span<const std::int64_t>, std::span<double>);
template void accumulate_difference<double>(std::span<const std::complex<double>>,
                                            std::span<const std::complex<double>>,
                                            std::span<const std::int64_t>, std::span<double>);

template ResultMap without_ft<float>(const SpectrumStack<float>&, std::vector<std::int64_t>,
                                     const WaveVectorSet&, int, RunCounters*);
template ResultMap without_ft<double>(const SpectrumStack<double>&, std::vector<std::int64_t>,
                                      const WaveVectorSet&, int, RunCounters*);

} // namespace ddm
