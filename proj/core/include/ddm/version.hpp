#ifndef DDM_VERSION_HPP
#define DDM_VERSION_HPP

namespace ddm {

inline constexpr const char* kVersion = "0.1.0";

// Bumped whenever an on-disk format (raw stack, map files, partials,
// manifest) changes incompatibly.
inline constexpr int kFormatVersion = 1;

} // namespace ddm

#endif
