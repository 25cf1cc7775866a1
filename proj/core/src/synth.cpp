#include "ddm/synth.hpp"

#include "ddm/errors.hpp"
#include "ddm/version.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <span>
#include <vector>

namespace ddm {

namespace {

/// [0, 1) from the top 53 bits; the draw sequence is pinned to the
/// mt19937_64 output stream so stacks reproduce across platforms.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// One standard normal pair via Box-Muller (two uniform draws).
void normal_pair(std::mt19937_64& rng, double& z0, double& z1) {
    const double u1 = (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53; // (0, 1]
    const double u2 = uniform01(rng);
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * std::acos(-1.0) * u2;
    z0 = r * std::cos(theta);
    z1 = r * std::sin(theta);
}

double wrap(double x, double period) {
    x = std::fmod(x, period);
    if (x < 0.0)
        x += period;
    return x;
}

void render_frame(std::span<const double> xs, std::span<const double> ys,
                  const SynthConfig& config, std::span<std::uint16_t> out) {
    const int width = config.width;
    const int height = config.height;
    std::vector<double> canvas(static_cast<std::size_t>(width) * height,
                               config.background);

    const double sigma = config.psf_sigma;
    const double reach = 4.0 * sigma;
    const double inv_two_sigma2 = 1.0 / (2.0 * sigma * sigma);

    for (std::size_t p = 0; p < xs.size(); ++p) {
        const double cx = xs[p];
        const double cy = ys[p];
        const int iy0 = static_cast<int>(std::floor(cy - reach));
        const int iy1 = static_cast<int>(std::ceil(cy + reach));
        const int ix0 = static_cast<int>(std::floor(cx - reach));
        const int ix1 = static_cast<int>(std::ceil(cx + reach));
        for (int iy = iy0; iy <= iy1; ++iy) {
            const double dy = static_cast<double>(iy) - cy;
            const int row = ((iy % height) + height) % height;
            for (int ix = ix0; ix <= ix1; ++ix) {
                const double dx = static_cast<double>(ix) - cx;
                const double r2 = dx * dx + dy * dy;
                if (r2 > reach * reach)
                    continue;
                const int col = ((ix % width) + width) % width;
                canvas[static_cast<std::size_t>(row) * width + col] +=
                    config.amplitude * std::exp(-r2 * inv_two_sigma2);
            }
        }
    }

    for (std::size_t i = 0; i < canvas.size(); ++i) {
        const double v = std::llround(canvas[i]);
        out[i] = static_cast<std::uint16_t>(std::clamp(v, 0.0, 65535.0));
    }
}

} // namespace

void SynthConfig::validate() const {
    if (particles < 0)
        throw InputError("synth: particle count must be non-negative");
    if (diffusion < 0.0)
        throw InputError("synth: diffusion must be non-negative");
    if (psf_sigma <= 0.0)
        throw InputError("synth: psf sigma must be positive");
    if (width < 1 || height < 1 || frames < 1)
        throw InputError("synth: degenerate stack dimensions");
    if (amplitude < 0.0 || background < 0.0)
        throw InputError("synth: negative intensities");
    if (frame_interval <= 0.0)
        throw InputError("synth: frame interval must be positive");
}

ImageStack generate(const SynthConfig& config) {
    config.validate();

    ImageStack stack;
    stack.width = config.width;
    stack.height = config.height;
    stack.frames = config.frames;
    stack.frame_interval = config.frame_interval;
    stack.pixels.resize(static_cast<std::size_t>(config.frames) *
                        static_cast<std::size_t>(stack.pixels_per_frame()));

    std::mt19937_64 rng(config.seed);
    const auto count = static_cast<std::size_t>(config.particles);
    std::vector<double> xs(count);
    std::vector<double> ys(count);
    for (std::size_t p = 0; p < count; ++p) {
        xs[p] = uniform01(rng) * config.width;
        ys[p] = uniform01(rng) * config.height;
    }

    const double step = std::sqrt(2.0 * config.diffusion);
    for (int n = 0; n < config.frames; ++n) {
        if (n > 0) {
            for (std::size_t p = 0; p < count; ++p) {
                double z0 = 0.0;
                double z1 = 0.0;
                normal_pair(rng, z0, z1);
                xs[p] = wrap(xs[p] + step * z0, config.width);
                ys[p] = wrap(ys[p] + step * z1, config.height);
            }
        }
        render_frame(xs, ys, config, stack.frame(n));
    }
    return stack;
}

void write_synth_manifest(const SynthConfig& config, const std::filesystem::path& path) {
    nlohmann::json manifest;
    manifest["tool_version"] = kVersion;
    manifest["generator"] = "mt19937_64/box-muller";
    manifest["particles"] = config.particles;
    manifest["diffusion"] = config.diffusion;
    manifest["psf_sigma"] = config.psf_sigma;
    manifest["amplitude"] = config.amplitude;
    manifest["background"] = config.background;
    manifest["width"] = config.width;
    manifest["height"] = config.height;
    manifest["frames"] = config.frames;
    manifest["frame_interval"] = config.frame_interval;
    manifest["seed"] = config.seed;

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot open " + path.string() + " for writing");
    out << manifest.dump(2) << '\n';
    if (!out)
        throw IoError("write failed for " + path.string());
}

} // namespace ddm
