#ifndef CSC_BYTE_STAGE_HPP
#define CSC_BYTE_STAGE_HPP

#include <cstddef>
#include <vector>

namespace csc {

// General-purpose lossless byte stage (deflate). Output layout:
//   [u8 mode: 0 identity | 1 deflate][u64le raw size][data]
// The identity path is taken whenever deflate fails to shrink the input.
std::vector<unsigned char> byte_stage_pack(const std::vector<unsigned char>& raw);
std::vector<unsigned char> byte_stage_unpack(const unsigned char* data, size_t size);

}  // namespace csc

#endif
