#ifndef DDM_FRAME_SOURCE_HPP
#define DDM_FRAME_SOURCE_HPP

#include "ddm/image_stack.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace ddm {

/// Random access to the frames of a stack without requiring the whole
/// stack in memory. read_frame is safe to call from multiple threads.
class FrameSource {
public:
    virtual ~FrameSource() = default;

    virtual int width() const = 0;
    virtual int height() const = 0;
    virtual int frames() const = 0;
    virtual double frame_interval() const = 0;

    std::int64_t pixels_per_frame() const
    {
        return static_cast<std::int64_t>(width()) * height();
    }

    /// Fills `out` (size width*height) with the pixels of frame n.
    virtual void read_frame(int n, std::span<std::uint16_t> out) const = 0;
};

/// Serves frames from an in-memory ImageStack (no copy).
class MemoryFrameSource final : public FrameSource {
public:
    explicit MemoryFrameSource(ImageStack stack);

    int width() const override { return stack_.width; }
    int height() const override { return stack_.height; }
    int frames() const override { return stack_.frames; }
    double frame_interval() const override { return stack_.frame_interval; }
    void read_frame(int n, std::span<std::uint16_t> out) const override;

    const ImageStack& stack() const { return stack_; }

private:
    ImageStack stack_;
};

/// Streams frames from a raw_stack file by seeking into the payload.
class RawStackFileSource final : public FrameSource {
public:
    explicit RawStackFileSource(const std::filesystem::path& path);

    int width() const override { return width_; }
    int height() const override { return height_; }
    int frames() const override { return frames_; }
    double frame_interval() const override { return frame_interval_; }
    void read_frame(int n, std::span<std::uint16_t> out) const override;

private:
    std::filesystem::path path_;
    std::int64_t payload_offset_ = 0;
    int width_ = 0;
    int height_ = 0;
    int frames_ = 0;
    double frame_interval_ = 1.0;
    mutable std::mutex mutex_;
    mutable std::ifstream file_;
};

/// Streams frames from a directory of PGM files (lexicographic order).
class PgmDirSource final : public FrameSource {
public:
    explicit PgmDirSource(const std::filesystem::path& dir);

    int width() const override { return width_; }
    int height() const override { return height_; }
    int frames() const override { return static_cast<int>(files_.size()); }
    double frame_interval() const override { return 1.0; }
    void read_frame(int n, std::span<std::uint16_t> out) const override;

private:
    std::vector<std::filesystem::path> files_;
    int width_ = 0;
    int height_ = 0;
};

/// Opens a file-backed source for the given format.
std::unique_ptr<FrameSource> open_frame_source(const std::filesystem::path& path,
                                               StackFormat format);

} // namespace ddm

#endif
