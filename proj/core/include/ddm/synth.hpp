#ifndef DDM_SYNTH_HPP
#define DDM_SYNTH_HPP

#include "ddm/image_stack.hpp"

#include <cstdint>
#include <filesystem>

namespace ddm {

/*!
    Brownian colloid stack with a known diffusion coefficient. Particles
    start uniformly, every frame each coordinate takes an independent
    Gaussian step of variance 2 * diffusion, positions wrap periodically,
    and each particle is rendered as a Gaussian blob (truncated at 4 sigma)
    on a flat background. Pixels are clamped to [0, 65535].

    Generation is a single fixed draw sequence from a named PRNG
    (mt19937_64 with an explicit Box-Muller transform), so stacks are
    bit-identical for equal seeds on any platform.
 */
struct SynthConfig {
    std::int64_t particles = 100;
    double diffusion = 0.5; // pixel^2 per frame
    double psf_sigma = 1.0; // pixels
    double amplitude = 1000.0;
    double background = 100.0;
    int width = 64;
    int height = 64;
    int frames = 256;
    double frame_interval = 1.0; // seconds
    std::uint64_t seed = 0;

    void validate() const;
};

ImageStack generate(const SynthConfig& config);

/// synth.json next to the stack: the full config plus the generator name.
void write_synth_manifest(const SynthConfig& config, const std::filesystem::path& path);

} // namespace ddm

#endif
