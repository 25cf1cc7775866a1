#ifndef DDM_FFT_HPP
#define DDM_FFT_HPP

#include <complex>
#include <cstdint>
#include <memory>
#include <span>

namespace ddm {

/*!
    Real-to-complex 2D transform of one image frame.

    Input is a width x height frame, row-major; output is the half-plane
    spectrum of height x (width/2 + 1) complex values (non-negative
    horizontal frequencies; Hermitian redundancy removed). The transform is
    the unnormalized forward FFT, so the (0,0) element equals the sum of
    all pixels.

    Each instance owns its aligned buffers and plan. Plan creation is
    serialized internally (the planner is not thread safe); execution is
    safe from the owning thread, and distinct instances may run
    concurrently. Plans are deterministic for a given shape, so results
    are bitwise identical across instances, runs, and worker counts.
 */
template <typename Scalar>
class SpatialTransform {
public:
    SpatialTransform(int width, int height);
    ~SpatialTransform();
    SpatialTransform(SpatialTransform&&) noexcept;
    SpatialTransform& operator=(SpatialTransform&&) noexcept;
    SpatialTransform(const SpatialTransform&) = delete;
    SpatialTransform& operator=(const SpatialTransform&) = delete;

    int width() const { return width_; }
    int height() const { return height_; }
    int half_cols() const { return width_ / 2 + 1; }

    /// Frame buffer to fill before run(), width*height values row-major.
    std::span<Scalar> input();

    /// Executes input -> output.
    void run();

    /// Half-plane spectrum, height x half_cols row-major.
    std::span<const std::complex<Scalar>> output() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    int width_ = 0;
    int height_ = 0;
};

/*!
    In-place complex 1D transform over a padded time sequence.

    Both directions are unnormalized (a forward/backward round trip scales
    by the length). One instance per (length, precision) pair is created
    and reused across sequences.
 */
template <typename Scalar>
class TemporalTransform {
public:
    explicit TemporalTransform(std::int64_t length);
    ~TemporalTransform();
    TemporalTransform(TemporalTransform&&) noexcept;
    TemporalTransform& operator=(TemporalTransform&&) noexcept;
    TemporalTransform(const TemporalTransform&) = delete;
    TemporalTransform& operator=(const TemporalTransform&) = delete;

    std::int64_t length() const { return length_; }

    std::span<std::complex<Scalar>> buffer();

    void forward();
    void backward();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::int64_t length_ = 0;
};

extern template class SpatialTransform<float>;
extern template class SpatialTransform<double>;
extern template class TemporalTransform<float>;
extern template class TemporalTransform<double>;

} // namespace ddm

#endif
