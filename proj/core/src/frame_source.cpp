#include "ddm/frame_source.hpp"

#include "ddm/errors.hpp"
#include "pgm_detail.hpp"

#include <nlohmann/json.hpp>

#include <cstring>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace ddm {

MemoryFrameSource::MemoryFrameSource(ImageStack stack)
    : stack_(std::move(stack))
{
    stack_.validate();
}

void MemoryFrameSource::read_frame(int n, std::span<std::uint16_t> out) const
{
    const auto src = stack_.frame(n);
    std::memcpy(out.data(), src.data(), src.size_bytes());
}

RawStackFileSource::RawStackFileSource(const fs::path& path)
    : path_(path)
{
    if (!fs::exists(path))
        throw IoError("path does not exist: " + path.string());
    file_.open(path, std::ios::binary);
    if (!file_)
        throw IoError("cannot open " + path.string());

    std::string header_line;
    if (!std::getline(file_, header_line))
        throw InputError("raw_stack " + path.string() + ": missing header line");
    payload_offset_ = static_cast<std::int64_t>(header_line.size()) + 1;

    json header;
    try {
        header = json::parse(header_line);
        width_ = header.at("width").get<int>();
        height_ = header.at("height").get<int>();
        frames_ = header.at("frames").get<int>();
        if (header.at("dtype").get<std::string>() != "u16le")
            throw InputError("raw_stack " + path.string() + ": unsupported dtype");
        if (header.contains("frame_interval"))
            frame_interval_ = header.at("frame_interval").get<double>();
    } catch (const json::exception& e) {
        throw InputError("raw_stack " + path.string() + ": bad header: " + e.what());
    }
    if (width_ < 1 || height_ < 1 || frames_ < 1)
        throw InputError("raw_stack " + path.string() + ": dimensions must be positive");

    file_.seekg(0, std::ios::end);
    const std::int64_t size = static_cast<std::int64_t>(file_.tellg());
    const std::int64_t expected = payload_offset_ + 2 * pixels_per_frame() * frames_;
    if (size < expected)
        throw InputError("raw_stack " + path.string() + ": truncated payload");
}

void RawStackFileSource::read_frame(int n, std::span<std::uint16_t> out) const
{
    const std::int64_t frame_bytes = 2 * pixels_per_frame();
    std::vector<unsigned char> raw(static_cast<std::size_t>(frame_bytes));
    {
        std::lock_guard<std::mutex> lock(mutex_);
        file_.clear();
        file_.seekg(payload_offset_ + n * frame_bytes);
        file_.read(reinterpret_cast<char*>(raw.data()), frame_bytes);
        if (file_.gcount() != frame_bytes)
            throw IoError("raw_stack " + path_.string() + ": short read");
    }
    for (std::size_t i = 0; i < out.size(); ++i)
        out[i] = static_cast<std::uint16_t>(raw[2 * i] | (raw[2 * i + 1] << 8));
}

PgmDirSource::PgmDirSource(const fs::path& dir)
    : files_(detail::list_pgm_files(dir))
{
    const detail::PgmFrame first = detail::read_pgm(files_.front());
    width_ = first.width;
    height_ = first.height;
}

void PgmDirSource::read_frame(int n, std::span<std::uint16_t> out) const
{
    const detail::PgmFrame frame = detail::read_pgm(files_[static_cast<std::size_t>(n)]);
    if (frame.width != width_ || frame.height != height_)
        throw InputError("pgm " + files_[static_cast<std::size_t>(n)].string() +
                         ": frame dimensions differ from the first frame");
    std::memcpy(out.data(), frame.samples.data(), out.size_bytes());
}

std::unique_ptr<FrameSource> open_frame_source(const fs::path& path, StackFormat format)
{
    if (format == StackFormat::PgmDir)
        return std::make_unique<PgmDirSource>(path);
    return std::make_unique<RawStackFileSource>(path);
}

} // namespace ddm
