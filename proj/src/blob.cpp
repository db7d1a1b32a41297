#include "csc/blob.hpp"

#include <cstring>
#include <fstream>

#include "csc/errors.hpp"
#include "csc/version.hpp"

namespace csc {

namespace {

constexpr char kMagic[4] = {'C', 'S', 'C', 'X'};

void put_u16le(std::vector<unsigned char>& out, std::uint16_t v) {
    out.push_back(static_cast<unsigned char>(v));
    out.push_back(static_cast<unsigned char>(v >> 8));
}

void put_u32le(std::vector<unsigned char>& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint32_t get_u32le(const unsigned char* p) {
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(p[i]) << (8 * i);
    return v;
}

}  // namespace

std::vector<unsigned char> CompressedBlob::serialize() const {
    std::vector<unsigned char> out;
    out.reserve(payload.size() + codec_id.size() + 32);
    out.insert(out.end(), kMagic, kMagic + 4);
    out.push_back(kBlobVersion);
    put_u16le(out, static_cast<std::uint16_t>(codec_id.size()));
    out.insert(out.end(), codec_id.begin(), codec_id.end());
    put_u32le(out, static_cast<std::uint32_t>(nx));
    put_u32le(out, static_cast<std::uint32_t>(ny));
    unsigned char eb_bytes[8];
    std::memcpy(eb_bytes, &eb, 8);  // IEEE-754 little-endian host assumed for on-disk layout
    out.insert(out.end(), eb_bytes, eb_bytes + 8);
    out.insert(out.end(), payload.begin(), payload.end());
    return out;
}

size_t CompressedBlob::total_bytes() const {
    return 4 + 1 + 2 + codec_id.size() + 4 + 4 + 8 + payload.size();
}

CompressedBlob parse_blob(const unsigned char* data, size_t size) {
    if (size < 23) throw integrity_error("blob truncated: " + std::to_string(size) + " bytes");
    if (std::memcmp(data, kMagic, 4) != 0) throw integrity_error("blob magic mismatch");
    const unsigned char version = data[4];
    if (version != kBlobVersion) {
        throw version_error("blob version " + std::to_string(version) + " unsupported (expected " +
                            std::to_string(kBlobVersion) + ")");
    }
    const std::uint16_t id_len = static_cast<std::uint16_t>(data[5] | (data[6] << 8));
    size_t pos = 7;
    if (pos + id_len + 16 > size) throw integrity_error("blob header truncated");
    CompressedBlob blob;
    blob.codec_id.assign(reinterpret_cast<const char*>(data + pos), id_len);
    pos += id_len;
    blob.nx = static_cast<int>(get_u32le(data + pos));
    blob.ny = static_cast<int>(get_u32le(data + pos + 4));
    std::memcpy(&blob.eb, data + pos + 8, 8);
    pos += 16;
    blob.payload.assign(data + pos, data + size);
    return blob;
}

CompressedBlob parse_blob(const std::vector<unsigned char>& bytes) {
    return parse_blob(bytes.data(), bytes.size());
}

void write_blob_file(const CompressedBlob& blob, const std::string& path) {
    const std::vector<unsigned char> bytes = blob.serialize();
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw input_error("cannot create '" + path + "'");
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw input_error("short write on '" + path + "'");
}

CompressedBlob read_blob_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open '" + path + "'");
    std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                     std::istreambuf_iterator<char>());
    return parse_blob(bytes);
}

}  // namespace csc
