#ifndef DDM_TEMPORAL_HPP
#define DDM_TEMPORAL_HPP

#include "ddm/fft.hpp"
#include "ddm/timing.hpp"

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

namespace ddm {

/*!
    Padded length for linear (non-circular) autocorrelation by FFT:
    N2 = 2^(ceil(log2 N) + 1). Always a power of two and at least 2N, so
    the wrap-around terms of the circular correlation land on zeros.
 */
std::int64_t pad_length(std::int64_t frames);

/// d(m) over lags m in [0, N-1] for one time sequence, with the two terms
/// of the expansion kept for diagnostics:
///   d(m) = d_a(m) - 2 * corr(m) / (N - m)
/// where d_a is the modulus-squared averages term (already carries its
/// 1/(N-m)) and corr is the raw autocorrelation sum (ramp applied in the
/// combination).
struct LagProfile {
    std::vector<double> d;
    std::vector<double> d_a;
    std::vector<double> corr;

    std::int64_t lags() const { return static_cast<std::int64_t>(d.size()); }
};

/*!
    Averages term
        d_a(m) = 1/(N-m) * sum_{n=m}^{N-1} (|s_{n-m}|^2 + |s_n|^2),
    i.e. the mean of the first N-m squared moduli plus the mean of the
    last N-m. Computed in O(N) by the backward recursion
        d_a(N-n-1) = n/(n+1) * d_a(N-n) + (|s_n|^2 + |s_{N-n-1}|^2)/(n+1)
    iterating n from 0 to N-1. Accumulation is in double for either
    precision.
 */
template <typename Scalar>
std::vector<double> averages_term(std::span<const std::complex<Scalar>> seq);

/*!
    Per-worker engine for the FFT-in-time path. Owns the padded scratch
    buffer and the temporal transform plans for one sequence length, and
    reuses them across sequences. Not thread safe; give each worker its
    own instance.
 */
template <typename Scalar>
class SequenceEngine {
public:
    explicit SequenceEngine(std::int64_t frames);

    std::int64_t frames() const { return frames_; }
    std::int64_t padded_length() const { return fft_.length(); }

    /// Raw autocorrelation corr(m) = sum_{n=m}^{N-1} Re(conj(s_{n-m}) s_n),
    /// m in [0, N-1], via zero-pad -> FFT -> |.|^2 -> inverse FFT -> real
    /// part of the first N elements. Exactly 2 temporal transforms.
    std::vector<double> correlation(std::span<const std::complex<Scalar>> seq);

    /*!
        Full pipeline: averages term + correlation + combination. The
        time-mean of the sequence is removed before the transform stage;
        d is offset invariant, and working on fluctuations keeps the
        subtraction in the combination step from cancelling mean-sized
        terms, which matters in single precision. The reported d_a and
        corr are restored to the original basis.
     */
    LagProfile with_ft(std::span<const std::complex<Scalar>> seq);

    /// Temporal transforms executed so far (2 per correlation call).
    std::uint64_t temporal_fft_count() const { return temporal_ffts_; }

private:
    std::int64_t frames_;
    TemporalTransform<Scalar> fft_;
    std::vector<std::complex<Scalar>> shifted_;
    std::uint64_t temporal_ffts_ = 0;
};

/// One-shot convenience wrappers around SequenceEngine.
template <typename Scalar>
std::vector<double> correlation_term(std::span<const std::complex<Scalar>> seq,
                                     RunCounters* counters = nullptr);
template <typename Scalar>
LagProfile with_ft_sequence(std::span<const std::complex<Scalar>> seq,
                            RunCounters* counters = nullptr);

/// Combination d(m) = d_a(m) - 2 * corr(m) / (N - m).
LagProfile combine(std::vector<double> d_a, std::vector<double> corr);

/*!
    O(N^2) reference for one sequence by the defining double loop
        d(m) = 1/(N-m) * sum_{n=m}^{N-1} |s_{n-m} - s_n|^2.
    Testing only; also evaluates d_a and corr by their defining sums.
 */
LagProfile direct_sequence_oracle(std::span<const std::complex<double>> seq);

extern template std::vector<double> averages_term<float>(std::span<const std::complex<float>>);
extern template std::vector<double> averages_term<double>(std::span<const std::complex<double>>);
extern template class SequenceEngine<float>;
extern template class SequenceEngine<double>;
extern template std::vector<double>
correlation_term<float>(std::span<const std::complex<float>>, RunCounters*);
extern template std::vector<double>
correlation_term<double>(std::span<const std::complex<double>>, RunCounters*);
extern template LagProfile with_ft_sequence<float>(std::span<const std::complex<float>>,
                                                   RunCounters*);
extern template LagProfile with_ft_sequence<double>(std::span<const std::complex<double>>,
                                                    RunCounters*);

} // namespace ddm

#endif
