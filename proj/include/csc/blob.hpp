#ifndef CSC_BLOB_HPP
#define CSC_BLOB_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace csc {

// Container for one compressed field. Wire layout (little-endian):
//   magic "CSCX" | u8 version | u16 codec_id length | codec_id bytes |
//   u32 nx | u32 ny | f64 eb | payload
struct CompressedBlob {
    std::string codec_id;
    int nx = 0;
    int ny = 0;
    double eb = 0.0;
    std::vector<unsigned char> payload;

    std::vector<unsigned char> serialize() const;
    size_t total_bytes() const;
};

CompressedBlob parse_blob(const unsigned char* data, size_t size);
CompressedBlob parse_blob(const std::vector<unsigned char>& bytes);

void write_blob_file(const CompressedBlob& blob, const std::string& path);
CompressedBlob read_blob_file(const std::string& path);

}  // namespace csc

#endif
