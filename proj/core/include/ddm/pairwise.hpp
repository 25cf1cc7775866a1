#ifndef DDM_PAIRWISE_HPP
#define DDM_PAIRWISE_HPP

#include "ddm/image_stack.hpp"
#include "ddm/result_map.hpp"
#include "ddm/spectrum.hpp"
#include "ddm/timing.hpp"

#include <complex>
#include <cstdint>
#include <span>

namespace ddm {

/// acc[j] += |earlier[idx[j]] - later[idx[j]]|^2 for j in [0, idx.size()).
/// Double accumulation regardless of spectrum precision.
template <typename Scalar>
void accumulate_difference(std::span<const std::complex<Scalar>> earlier,
                           std::span<const std::complex<Scalar>> later,
                           std::span<const std::int64_t> idx, std::span<double> acc);

/*!
    Classical engine: for each requested lag m,
        d(m) = 1/(N-m) * sum_{n=m}^{N-1} |S_{n-m} - S_n|^2
    per retained wave vector, accumulated in ascending n. Lag 0 is emitted
    as a zero map without evaluating any pairs. Coefficients outside the
    wave-vector set stay zero.

    Workers split the retained wave vectors into contiguous tiles; each
    tile is accumulated independently, so values are identical for any
    worker count. The pair counter advances once per (m, n) pair, not per
    wave vector.
 */
template <typename Scalar>
ResultMap without_ft(const SpectrumStack<Scalar>& spectra, std::vector<std::int64_t> lags,
                     const WaveVectorSet& wave_vectors, int workers,
                     RunCounters* counters = nullptr);

/*!
    Literal reference: transforms every image difference I_{n-m} - I_n and
    averages the squared moduli. O(pairs) spatial transforms, double
    precision only. Testing scale.
 */
ResultMap direct_eq1(const ImageStack& stack, std::vector<std::int64_t> lags,
                     RunCounters* counters = nullptr);

extern template void accumulate_difference<float>(std::span<const std::complex<float>>,
                                                  std::span<const std::complex<float>>,
                                                  std::span<const std::int64_t>,
                                                  std::span<double>);
extern template void accumulate_difference<double>(std::span<const std::complex<double>>,
                                                   std::span<const std::complex<double>>,
                                                   std::span<const std::int64_t>,
                                                   std::span<double>);
extern template ResultMap without_ft<float>(const SpectrumStack<float>&,
                                            std::vector<std::int64_t>, const WaveVectorSet&,
                                            int, RunCounters*);
extern template ResultMap without_ft<double>(const SpectrumStack<double>&,
                                             std::vector<std::int64_t>, const WaveVectorSet&,
                                             int, RunCounters*);

} // namespace ddm

#endif
