#ifndef DDM_SRC_PGM_DETAIL_HPP
#define DDM_SRC_PGM_DETAIL_HPP

#include <cstdint>
#include <filesystem>
#include <vector>

namespace ddm::detail {

struct PgmFrame {
    int width = 0;
    int height = 0;
    std::vector<std::uint16_t> samples;
};

// Binary PGM (P5) with maxval 65535, big-endian samples.
PgmFrame read_pgm(const std::filesystem::path& file);

// *.pgm files in `dir`, sorted by file name.
std::vector<std::filesystem::path> list_pgm_files(const std::filesystem::path& dir);

} // namespace ddm::detail

#endif
