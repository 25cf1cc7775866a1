#include "ddm/temporal.hpp"

#include "ddm/errors.hpp"

#include <algorithm>
#include <cmath>

namespace ddm {

std::int64_t pad_length(std::int64_t frames) {
    if (frames < 1)
        throw InputError("pad_length: sequence must have at least one frame");
    std::int64_t n2 = 1;
    while (n2 < frames)
        n2 <<= 1;
    return n2 << 1;
}

template <typename Scalar>
std::vector<double> averages_term(std::span<const std::complex<Scalar>> seq) {
    const auto n_frames = static_cast<std::int64_t>(seq.size());
    if (n_frames < 1)
        throw InputError("averages_term: empty sequence");

    std::vector<double> power(static_cast<std::size_t>(n_frames));
    for (std::int64_t n = 0; n < n_frames; ++n) {
        const double re = static_cast<double>(seq[static_cast<std::size_t>(n)].real());
        const double im = static_cast<double>(seq[static_cast<std::size_t>(n)].imag());
        power[static_cast<std::size_t>(n)] = re * re + im * im;
    }

    std::vector<double> d_a(static_cast<std::size_t>(n_frames));
    double prev = 0.0;
    for (std::int64_t n = 0; n < n_frames; ++n) {
        const std::int64_t m = n_frames - n - 1;
        const double w = 1.0 / static_cast<double>(n + 1);
        prev = static_cast<double>(n) * w * prev +
               (power[static_cast<std::size_t>(n)] + power[static_cast<std::size_t>(m)]) * w;
        d_a[static_cast<std::size_t>(m)] = prev;
    }
    return d_a;
}

template <typename Scalar>
SequenceEngine<Scalar>::SequenceEngine(std::int64_t frames)
    : frames_(frames), fft_(pad_length(frames)) {}

template <typename Scalar>
std::vector<double> SequenceEngine<Scalar>::correlation(
    std::span<const std::complex<Scalar>> seq) {
    if (static_cast<std::int64_t>(seq.size()) != frames_)
        throw InputError("SequenceEngine: sequence length does not match engine");

    const std::int64_t n2 = fft_.length();
    auto buf = fft_.buffer();
    std::copy(seq.begin(), seq.end(), buf.begin());
    std::fill(buf.begin() + frames_, buf.end(), std::complex<Scalar>{});

    fft_.forward();
    for (auto& v : buf) {
        const Scalar re = v.real();
        const Scalar im = v.imag();
        v = std::complex<Scalar>(re * re + im * im, Scalar(0));
    }
    fft_.backward();
    temporal_ffts_ += 2;

    // both transforms are unnormalized, so divide once by N2
    const double scale = 1.0 / static_cast<double>(n2);
    std::vector<double> corr(static_cast<std::size_t>(frames_));
    for (std::int64_t m = 0; m < frames_; ++m)
        corr[static_cast<std::size_t>(m)] =
            static_cast<double>(buf[static_cast<std::size_t>(m)].real()) * scale;
    return corr;
}

template <typename Scalar>
LagProfile SequenceEngine<Scalar>::with_ft(std::span<const std::complex<Scalar>> seq) {
    if (static_cast<std::int64_t>(seq.size()) != frames_)
        throw InputError("SequenceEngine: sequence length does not match engine");

    std::complex<double> mean{};
    for (const auto& v : seq)
        mean += std::complex<double>(v.real(), v.imag());
    mean /= static_cast<double>(frames_);
    const std::complex<Scalar> offset(static_cast<Scalar>(mean.real()),
                                      static_cast<Scalar>(mean.imag()));

    shifted_.resize(seq.size());
    for (std::size_t n = 0; n < seq.size(); ++n)
        shifted_[n] = seq[n] - offset;
    const std::span<const std::complex<Scalar>> t(shifted_.data(), shifted_.size());

    LagProfile profile = combine(averages_term<Scalar>(t), correlation(t));

    // d is already correct (differences cancel the offset); put the two
    // reported terms back in the original basis with exact prefix sums
    profile.d_a = averages_term<Scalar>(seq);
    std::vector<std::complex<double>> prefix(seq.size() + 1);
    for (std::size_t n = 0; n < seq.size(); ++n)
        prefix[n + 1] = prefix[n] + std::complex<double>(t[n].real(), t[n].imag());
    const double power = std::norm(mean);
    for (std::int64_t m = 0; m < frames_; ++m) {
        const auto suffix = prefix[static_cast<std::size_t>(frames_)] -
                            prefix[static_cast<std::size_t>(m)];
        const auto head = prefix[static_cast<std::size_t>(frames_ - m)];
        profile.corr[static_cast<std::size_t>(m)] +=
            (std::conj(mean) * (suffix + head)).real() +
            power * static_cast<double>(frames_ - m);
    }
    return profile;
}

LagProfile combine(std::vector<double> d_a, std::vector<double> corr) {
    if (d_a.size() != corr.size())
        throw InputError("combine: term lengths differ");
    const auto n_frames = static_cast<std::int64_t>(d_a.size());

    LagProfile out;
    out.d.resize(d_a.size());
    for (std::int64_t m = 0; m < n_frames; ++m) {
        const double ramp = static_cast<double>(n_frames - m);
        out.d[static_cast<std::size_t>(m)] =
            d_a[static_cast<std::size_t>(m)] - 2.0 * corr[static_cast<std::size_t>(m)] / ramp;
    }
    out.d_a = std::move(d_a);
    out.corr = std::move(corr);
    return out;
}

template <typename Scalar>
std::vector<double> correlation_term(std::span<const std::complex<Scalar>> seq,
                                     RunCounters* counters) {
    SequenceEngine<Scalar> engine(static_cast<std::int64_t>(seq.size()));
    auto corr = engine.correlation(seq);
    if (counters)
        counters->temporal_ffts += engine.temporal_fft_count();
    return corr;
}

template <typename Scalar>
LagProfile with_ft_sequence(std::span<const std::complex<Scalar>> seq, RunCounters* counters) {
    SequenceEngine<Scalar> engine(static_cast<std::int64_t>(seq.size()));
    auto profile = engine.with_ft(seq);
    if (counters)
        counters->temporal_ffts += engine.temporal_fft_count();
    return profile;
}

LagProfile direct_sequence_oracle(std::span<const std::complex<double>> seq) {
    const auto n_frames = static_cast<std::int64_t>(seq.size());
    if (n_frames < 1)
        throw InputError("direct_sequence_oracle: empty sequence");

    LagProfile out;
    out.d.resize(seq.size());
    out.d_a.resize(seq.size());
    out.corr.resize(seq.size());
    for (std::int64_t m = 0; m < n_frames; ++m) {
        double sum_d = 0.0;
        double sum_a = 0.0;
        double sum_c = 0.0;
        for (std::int64_t n = m; n < n_frames; ++n) {
            const auto a = seq[static_cast<std::size_t>(n - m)];
            const auto b = seq[static_cast<std::size_t>(n)];
            const auto diff = a - b;
            sum_d += std::norm(diff);
            sum_a += std::norm(a) + std::norm(b);
            sum_c += a.real() * b.real() + a.imag() * b.imag();
        }
        const double ramp = static_cast<double>(n_frames - m);
        out.d[static_cast<std::size_t>(m)] = sum_d / ramp;
        out.d_a[static_cast<std::size_t>(m)] = sum_a / ramp;
        out.corr[static_cast<std::size_t>(m)] = sum_c;
    }
    return out;
}

template std::vector<double> averages_term<float>(std::span<const std::complex<float>>);
template std::vector<double> averages_term<double>(std::span<const std::complex<double>>);
template class SequenceEngine<float>;
template class SequenceEngine<double>;
template std::vector<double> correlation_term<float>(std::span<const std::complex<float>>,
                                                     RunCounters*);
template std::vector<double> correlation_term<double>(std::span<const std::complex<double>>,
                                                      RunCounters*);
template LagProfile with_ft_sequence<float>(std::span<const std::complex<float>>, RunCounters*);
template LagProfile with_ft_sequence<double>(std::span<const std::complex<double>>, RunCounters*);

} // namespace ddm
