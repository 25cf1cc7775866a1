#ifndef DDM_TIMING_HPP
#define DDM_TIMING_HPP

#include <chrono>
#include <cstdint>

namespace ddm {

/// Wall-clock seconds spent in each phase of a run. Phases are monotone
/// accumulators; `other` is whatever part of `total` the named phases do
/// not account for, so the fractions always sum to one.
struct TimingBreakdown {
    double disk = 0.0;  // stack reads, partial/result writes
    double step1 = 0.0; // spatial transforms
    double step2 = 0.0; // time-sequence / lag processing
    double merge = 0.0; // partial-result merge
    double other = 0.0;
    double total = 0.0;

    double named_sum() const { return disk + step1 + step2 + merge; }

    void finish(double wall_total)
    {
        total = wall_total;
        other = total - named_sum();
        if (other < 0.0)
            other = 0.0;
    }
};

/// Operation counters. Unlike seconds these are exact and machine
/// independent, so complexity claims are asserted on them.
///   spatial_ffts  - 2D real-to-complex image transforms executed
///   temporal_ffts - 1D transforms over padded time sequences
///   pairs         - (lag, frame) difference updates; each update touches
///                   every retained wave vector, so the count is per wave
///                   vector, not multiplied by their number
struct RunCounters {
    std::uint64_t spatial_ffts = 0;
    std::uint64_t temporal_ffts = 0;
    std::uint64_t pairs = 0;

    RunCounters& operator+=(const RunCounters& o)
    {
        spatial_ffts += o.spatial_ffts;
        temporal_ffts += o.temporal_ffts;
        pairs += o.pairs;
        return *this;
    }
};

/// Accumulates elapsed seconds into a double via start/stop pairs.
class PhaseClock {
public:
    void start() { begin_ = std::chrono::steady_clock::now(); }

    void stop(double& accumulator)
    {
        const auto now = std::chrono::steady_clock::now();
        accumulator += std::chrono::duration<double>(now - begin_).count();
    }

private:
    std::chrono::steady_clock::time_point begin_{};
};

/// RAII start/stop around a phase accumulator.
class ScopedPhase {
public:
    explicit ScopedPhase(double& accumulator) : acc_(accumulator) { clock_.start(); }
    ~ScopedPhase() { clock_.stop(acc_); }
    ScopedPhase(const ScopedPhase&) = delete;
    ScopedPhase& operator=(const ScopedPhase&) = delete;

private:
    double& acc_;
    PhaseClock clock_;
};

} // namespace ddm

#endif
