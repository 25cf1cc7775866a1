#ifndef DDM_TEST_HELPERS_HPP
#define DDM_TEST_HELPERS_HPP

#include <ddm/image_stack.hpp>
#include <ddm/result_map.hpp>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include <unistd.h>

namespace ddmtest {

/// Unique scratch directory, removed on destruction.
class TempDir {
public:
    TempDir()
    {
        static std::atomic<std::uint64_t> counter{0};
        path_ = std::filesystem::temp_directory_path() /
                ("ddm-test-" + std::to_string(::getpid()) + "-" +
                 std::to_string(counter.fetch_add(1)));
        std::filesystem::create_directories(path_);
    }

    ~TempDir()
    {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }

    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;

    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline ddm::ImageStack random_stack(int width, int height, int frames, unsigned seed)
{
    std::mt19937 rng(seed);
    std::uniform_int_distribution<int> dist(0, 65535);
    ddm::ImageStack stack;
    stack.width = width;
    stack.height = height;
    stack.frames = frames;
    stack.pixels.resize(static_cast<std::size_t>(width) * height * frames);
    for (auto& px : stack.pixels)
        px = static_cast<std::uint16_t>(dist(rng));
    return stack;
}

inline ddm::ImageStack constant_stack(int width, int height, int frames,
                                      std::uint16_t value)
{
    ddm::ImageStack stack;
    stack.width = width;
    stack.height = height;
    stack.frames = frames;
    stack.pixels.assign(static_cast<std::size_t>(width) * height * frames, value);
    return stack;
}

/// max |a - b| over the global peak magnitude of either map; zero-only
/// maps compare by absolute difference.
inline double relative_deviation(const ddm::ResultMap& a, const ddm::ResultMap& b)
{
    double peak = 0.0;
    for (const double v : a.values)
        peak = std::max(peak, std::abs(v));
    for (const double v : b.values)
        peak = std::max(peak, std::abs(v));
    const double diff = ddm::max_abs_difference(a, b);
    return peak > 0.0 ? diff / peak : diff;
}

} // namespace ddmtest

#endif
