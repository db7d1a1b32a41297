#ifndef CSC_VERSION_HPP
#define CSC_VERSION_HPP

namespace csc {

inline constexpr const char* kToolVersion = "0.1.0";

// Bumped whenever any codec bitstream layout changes.
inline constexpr unsigned char kBlobVersion = 1;

}  // namespace csc

#endif
