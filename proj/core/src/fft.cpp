#include "ddm/fft.hpp"

#include "ddm/errors.hpp"

#include <fftw3.h>

#include <mutex>

namespace ddm {

namespace {

// fftw_plan_* and fftw_destroy_plan share global planner state.
std::mutex& planner_mutex()
{
    static std::mutex m;
    return m;
}

template <typename Scalar>
struct Fftw;

template <>
struct Fftw<double> {
    using Real = double;
    using Complex = fftw_complex;
    using Plan = fftw_plan;

    static void* alloc(std::size_t bytes) { return fftw_malloc(bytes); }
    static void free(void* p) { fftw_free(p); }
    static void destroy(Plan p) { fftw_destroy_plan(p); }
    static void execute(Plan p) { fftw_execute(p); }

    static Plan plan_r2c_2d(int rows, int cols, Real* in, Complex* out)
    {
        return fftw_plan_dft_r2c_2d(rows, cols, in, out, FFTW_ESTIMATE);
    }
    static Plan plan_c2c_1d(int n, Complex* buf, int sign)
    {
        return fftw_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE);
    }
};

template <>
struct Fftw<float> {
    using Real = float;
    using Complex = fftwf_complex;
    using Plan = fftwf_plan;

    static void* alloc(std::size_t bytes) { return fftwf_malloc(bytes); }
    static void free(void* p) { fftwf_free(p); }
    static void destroy(Plan p) { fftwf_destroy_plan(p); }
    static void execute(Plan p) { fftwf_execute(p); }

    static Plan plan_r2c_2d(int rows, int cols, Real* in, Complex* out)
    {
        return fftwf_plan_dft_r2c_2d(rows, cols, in, out, FFTW_ESTIMATE);
    }
    static Plan plan_c2c_1d(int n, Complex* buf, int sign)
    {
        return fftwf_plan_dft_1d(n, buf, buf, sign, FFTW_ESTIMATE);
    }
};

} // namespace

template <typename Scalar>
struct SpatialTransform<Scalar>::Impl {
    using F = Fftw<Scalar>;

    Scalar* in = nullptr;
    typename F::Complex* out = nullptr;
    typename F::Plan plan{};

    Impl(int width, int height)
    {
        const std::size_t n_in = static_cast<std::size_t>(width) * height;
        const std::size_t n_out = static_cast<std::size_t>(height) * (width / 2 + 1);
        in = static_cast<Scalar*>(F::alloc(n_in * sizeof(Scalar)));
        out = static_cast<typename F::Complex*>(F::alloc(n_out * sizeof(typename F::Complex)));
        if (!in || !out) {
            F::free(in);
            F::free(out);
            throw Error("fft: buffer allocation failed");
        }
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = F::plan_r2c_2d(height, width, in, out);
        if (!plan) {
            F::free(in);
            F::free(out);
            throw Error("fft: r2c plan creation failed");
        }
    }

    ~Impl()
    {
        {
            std::lock_guard<std::mutex> lock(planner_mutex());
            F::destroy(plan);
        }
        F::free(in);
        F::free(out);
    }
};

template <typename Scalar>
SpatialTransform<Scalar>::SpatialTransform(int width, int height)
    : width_(width), height_(height)
{
    if (width < 1 || height < 1)
        throw InputError("fft: frame dimensions must be positive");
    impl_ = std::make_unique<Impl>(width, height);
}

template <typename Scalar>
SpatialTransform<Scalar>::~SpatialTransform() = default;
template <typename Scalar>
SpatialTransform<Scalar>::SpatialTransform(SpatialTransform&&) noexcept = default;
template <typename Scalar>
SpatialTransform<Scalar>& SpatialTransform<Scalar>::operator=(SpatialTransform&&) noexcept = default;

template <typename Scalar>
std::span<Scalar> SpatialTransform<Scalar>::input()
{
    return {impl_->in, static_cast<std::size_t>(width_) * height_};
}

template <typename Scalar>
void SpatialTransform<Scalar>::run()
{
    Fftw<Scalar>::execute(impl_->plan);
}

template <typename Scalar>
std::span<const std::complex<Scalar>> SpatialTransform<Scalar>::output() const
{
    // fftw_complex has the same layout as std::complex<Scalar>.
    return {reinterpret_cast<const std::complex<Scalar>*>(impl_->out),
            static_cast<std::size_t>(height_) * half_cols()};
}

template <typename Scalar>
struct TemporalTransform<Scalar>::Impl {
    using F = Fftw<Scalar>;

    typename F::Complex* buf = nullptr;
    typename F::Plan fwd{};
    typename F::Plan bwd{};

    explicit Impl(std::int64_t length)
    {
        buf = static_cast<typename F::Complex*>(
            F::alloc(static_cast<std::size_t>(length) * sizeof(typename F::Complex)));
        if (!buf)
            throw Error("fft: buffer allocation failed");
        std::lock_guard<std::mutex> lock(planner_mutex());
        fwd = F::plan_c2c_1d(static_cast<int>(length), buf, FFTW_FORWARD);
        bwd = F::plan_c2c_1d(static_cast<int>(length), buf, FFTW_BACKWARD);
        if (!fwd || !bwd) {
            if (fwd)
                F::destroy(fwd);
            if (bwd)
                F::destroy(bwd);
            F::free(buf);
            throw Error("fft: c2c plan creation failed");
        }
    }

    ~Impl()
    {
        {
            std::lock_guard<std::mutex> lock(planner_mutex());
            F::destroy(fwd);
            F::destroy(bwd);
        }
        F::free(buf);
    }
};

template <typename Scalar>
TemporalTransform<Scalar>::TemporalTransform(std::int64_t length)
    : length_(length)
{
    if (length < 1)
        throw InputError("fft: transform length must be positive");
    impl_ = std::make_unique<Impl>(length);
}

template <typename Scalar>
TemporalTransform<Scalar>::~TemporalTransform() = default;
template <typename Scalar>
TemporalTransform<Scalar>::TemporalTransform(TemporalTransform&&) noexcept = default;
template <typename Scalar>
TemporalTransform<Scalar>& TemporalTransform<Scalar>::operator=(TemporalTransform&&) noexcept = default;

template <typename Scalar>
std::span<std::complex<Scalar>> TemporalTransform<Scalar>::buffer()
{
    return {reinterpret_cast<std::complex<Scalar>*>(impl_->buf),
            static_cast<std::size_t>(length_)};
}

template <typename Scalar>
void TemporalTransform<Scalar>::forward()
{
    Fftw<Scalar>::execute(impl_->fwd);
}

template <typename Scalar>
void TemporalTransform<Scalar>::backward()
{
    Fftw<Scalar>::execute(impl_->bwd);
}

template class SpatialTransform<float>;
template class SpatialTransform<double>;
template class TemporalTransform<float>;
template class TemporalTransform<double>;

} // namespace ddm
