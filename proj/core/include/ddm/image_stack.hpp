#ifndef DDM_IMAGE_STACK_HPP
#define DDM_IMAGE_STACK_HPP

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace ddm {

/// A stack of N frames of W x H unsigned 16-bit pixels, frame-major,
/// row-major within each frame.
struct ImageStack {
    int width = 0;
    int height = 0;
    int frames = 0;
    double frame_interval = 1.0; // seconds
    std::vector<std::uint16_t> pixels;

    std::int64_t pixels_per_frame() const
    {
        return static_cast<std::int64_t>(width) * height;
    }

    std::span<const std::uint16_t> frame(int n) const
    {
        return {pixels.data() + static_cast<std::size_t>(n) * pixels_per_frame(),
                static_cast<std::size_t>(pixels_per_frame())};
    }

    std::span<std::uint16_t> frame(int n)
    {
        return {pixels.data() + static_cast<std::size_t>(n) * pixels_per_frame(),
                static_cast<std::size_t>(pixels_per_frame())};
    }

    /// Throws InputError if dimensions and payload size disagree.
    void validate() const;
};

enum class StackFormat {
    PgmDir,   // directory of 16-bit binary PGM files, lexicographic frame order
    RawStack, // single file: one-line JSON header, then u16le frames
};

StackFormat parse_stack_format(const std::string& name);
std::string to_string(StackFormat format);

/// Loads a full stack into memory.
///
/// pgm_dir: every *.pgm file in the directory is one frame; frame order is
/// the lexicographic order of the file names (byte-wise), independent of
/// directory enumeration order. Each file must be binary PGM (P5) with
/// maxval 65535; samples are big-endian per the PGM convention.
///
/// raw_stack: one JSON header line terminated by '\n' with keys width,
/// height, frames, dtype ("u16le") and optional frame_interval, followed by
/// the contiguous little-endian u16 payload.
ImageStack load_stack(const std::filesystem::path& path, StackFormat format);

/// Writes the raw_stack representation of `stack` to `path`.
/// load_stack(path, RawStack) recovers the pixel data exactly.
void write_raw_stack(const ImageStack& stack, const std::filesystem::path& path);

/// Writes one frame as a binary PGM (P5, maxval 65535, big-endian samples).
void write_pgm(std::span<const std::uint16_t> frame, int width, int height,
               const std::filesystem::path& path);

} // namespace ddm

#endif
