#ifndef CSC_HUFFMAN_HPP
#define CSC_HUFFMAN_HPP

#include <cstdint>
#include <span>
#include <vector>

namespace csc {

// Canonical Huffman coding over arbitrary uint64 symbols. The encoded block
// is self-contained: a sorted (delta-varint) code-length table followed by
// the MSB-first bitstream. Lossless for any input, including empty streams
// and single-symbol alphabets.
std::vector<unsigned char> huffman_encode(std::span<const std::uint64_t> symbols);
std::vector<std::uint64_t> huffman_decode(const unsigned char* data, size_t size,
                                          size_t* consumed = nullptr);

}  // namespace csc

#endif
