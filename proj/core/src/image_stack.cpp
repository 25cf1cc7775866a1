#include "ddm/image_stack.hpp"

#include "ddm/errors.hpp"
#include "pgm_detail.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <fstream>

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace ddm {

namespace detail {

namespace {

// PGM header token: skips whitespace and '#' comments.
std::string next_pgm_token(std::istream& in)
{
    int c = in.get();
    while (c != EOF) {
        if (c == '#') {
            while (c != EOF && c != '\n')
                c = in.get();
        } else if (!std::isspace(c)) {
            break;
        }
        c = in.get();
    }
    std::string token;
    while (c != EOF && !std::isspace(c)) {
        token.push_back(static_cast<char>(c));
        c = in.get();
    }
    return token;
}

int parse_positive_int(const std::string& token, const char* what, const fs::path& file)
{
    try {
        std::size_t pos = 0;
        const long value = std::stol(token, &pos);
        if (pos != token.size() || value < 1)
            throw std::invalid_argument(token);
        return static_cast<int>(value);
    } catch (const std::exception&) {
        throw InputError("pgm " + file.string() + ": bad " + std::string(what) + " '" + token + "'");
    }
}

} // namespace

PgmFrame read_pgm(const fs::path& file)
{
    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + file.string());

    const std::string magic = next_pgm_token(in);
    if (magic != "P5")
        throw InputError("pgm " + file.string() + ": not a binary PGM (magic '" + magic + "')");

    PgmFrame frame;
    frame.width = parse_positive_int(next_pgm_token(in), "width", file);
    frame.height = parse_positive_int(next_pgm_token(in), "height", file);
    const std::string maxval = next_pgm_token(in);
    if (maxval != "65535")
        throw InputError("pgm " + file.string() + ": maxval must be 65535, got '" + maxval + "'");
    // next_pgm_token consumed exactly the single whitespace byte after maxval

    const std::size_t count = static_cast<std::size_t>(frame.width) * frame.height;
    std::vector<unsigned char> raw(count * 2);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
        throw InputError("pgm " + file.string() + ": truncated payload");

    frame.samples.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        // big-endian samples
        frame.samples[i] =
            static_cast<std::uint16_t>((raw[2 * i] << 8) | raw[2 * i + 1]);
    }
    return frame;
}

std::vector<fs::path> list_pgm_files(const fs::path& dir)
{
    if (!fs::exists(dir))
        throw IoError("path does not exist: " + dir.string());
    if (!fs::is_directory(dir))
        throw InputError("pgm_dir input is not a directory: " + dir.string());

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".pgm")
            files.push_back(entry.path());
    }
    if (files.empty())
        throw InputError("no *.pgm files in " + dir.string());

    // Frame order is a pure function of the file names.
    std::sort(files.begin(), files.end(), [](const fs::path& a, const fs::path& b) {
        return a.filename().string() < b.filename().string();
    });
    return files;
}

} // namespace detail

void ImageStack::validate() const
{
    if (width < 1 || height < 1 || frames < 1)
        throw InputError("image stack: dimensions must be at least 1x1x1");
    const auto expected =
        static_cast<std::size_t>(frames) * static_cast<std::size_t>(pixels_per_frame());
    if (pixels.size() != expected)
        throw InputError("image stack: pixel payload size does not match dimensions");
}

StackFormat parse_stack_format(const std::string& name)
{
    if (name == "pgm_dir")
        return StackFormat::PgmDir;
    if (name == "raw_stack")
        return StackFormat::RawStack;
    throw InputError("unknown stack format '" + name + "' (expected pgm_dir or raw_stack)");
}

std::string to_string(StackFormat format)
{
    return format == StackFormat::PgmDir ? "pgm_dir" : "raw_stack";
}

namespace {

ImageStack load_pgm_dir(const fs::path& dir)
{
    const std::vector<fs::path> files = detail::list_pgm_files(dir);

    ImageStack stack;
    stack.frames = static_cast<int>(files.size());
    for (int n = 0; n < stack.frames; ++n) {
        detail::PgmFrame frame = detail::read_pgm(files[static_cast<std::size_t>(n)]);
        if (n == 0) {
            stack.width = frame.width;
            stack.height = frame.height;
            stack.pixels.reserve(static_cast<std::size_t>(stack.frames) * frame.samples.size());
        } else if (frame.width != stack.width || frame.height != stack.height) {
            throw InputError("pgm " + files[static_cast<std::size_t>(n)].string() +
                             ": frame dimensions differ from the first frame");
        }
        stack.pixels.insert(stack.pixels.end(), frame.samples.begin(), frame.samples.end());
    }
    stack.validate();
    return stack;
}

ImageStack load_raw_stack(const fs::path& file)
{
    if (!fs::exists(file))
        throw IoError("path does not exist: " + file.string());

    std::ifstream in(file, std::ios::binary);
    if (!in)
        throw IoError("cannot open " + file.string());

    std::string header_line;
    if (!std::getline(in, header_line))
        throw InputError("raw_stack " + file.string() + ": missing header line");

    json header;
    try {
        header = json::parse(header_line);
    } catch (const json::exception& e) {
        throw InputError("raw_stack " + file.string() + ": bad header JSON: " + e.what());
    }

    ImageStack stack;
    try {
        stack.width = header.at("width").get<int>();
        stack.height = header.at("height").get<int>();
        stack.frames = header.at("frames").get<int>();
        const std::string dtype = header.at("dtype").get<std::string>();
        if (dtype != "u16le")
            throw InputError("raw_stack " + file.string() + ": unsupported dtype '" + dtype + "'");
        if (header.contains("frame_interval"))
            stack.frame_interval = header.at("frame_interval").get<double>();
    } catch (const json::exception& e) {
        throw InputError("raw_stack " + file.string() + ": bad header: " + e.what());
    }
    if (stack.width < 1 || stack.height < 1 || stack.frames < 1)
        throw InputError("raw_stack " + file.string() + ": dimensions must be positive");
    if (stack.frame_interval <= 0.0)
        throw InputError("raw_stack " + file.string() + ": frame_interval must be positive");

    const std::size_t count = static_cast<std::size_t>(stack.frames) *
                              static_cast<std::size_t>(stack.width) * stack.height;
    std::vector<unsigned char> raw(count * 2);
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
        throw InputError("raw_stack " + file.string() + ": truncated payload");

    stack.pixels.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        stack.pixels[i] =
            static_cast<std::uint16_t>(raw[2 * i] | (raw[2 * i + 1] << 8));
    }
    stack.validate();
    return stack;
}

} // namespace

ImageStack load_stack(const fs::path& path, StackFormat format)
{
    return format == StackFormat::PgmDir ? load_pgm_dir(path) : load_raw_stack(path);
}

void write_raw_stack(const ImageStack& stack, const fs::path& path)
{
    stack.validate();

    json header;
    header["width"] = stack.width;
    header["height"] = stack.height;
    header["frames"] = stack.frames;
    header["dtype"] = "u16le";
    header["frame_interval"] = stack.frame_interval;

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot create " + path.string());
    out << header.dump() << '\n';

    std::vector<unsigned char> raw(stack.pixels.size() * 2);
    for (std::size_t i = 0; i < stack.pixels.size(); ++i) {
        raw[2 * i] = static_cast<unsigned char>(stack.pixels[i] & 0xff);
        raw[2 * i + 1] = static_cast<unsigned char>(stack.pixels[i] >> 8);
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out)
        throw IoError("short write to " + path.string());
}

void write_pgm(std::span<const std::uint16_t> frame, int width, int height,
               const fs::path& path)
{
    if (static_cast<std::size_t>(width) * height != frame.size())
        throw InputError("write_pgm: frame size does not match dimensions");

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw IoError("cannot create " + path.string());
    out << "P5\n" << width << " " << height << "\n65535\n";

    std::vector<unsigned char> raw(frame.size() * 2);
    for (std::size_t i = 0; i < frame.size(); ++i) {
        raw[2 * i] = static_cast<unsigned char>(frame[i] >> 8);
        raw[2 * i + 1] = static_cast<unsigned char>(frame[i] & 0xff);
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out)
        throw IoError("short write to " + path.string());
}

} // namespace ddm
