#include "csc/byte_stage.hpp"

#include <cstring>

#include <zlib.h>

#include "csc/errors.hpp"

namespace csc {

namespace {

void put_u64le(std::vector<unsigned char>& out, std::uint64_t v) {
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<unsigned char>(v >> (8 * i)));
}

std::uint64_t get_u64le(const unsigned char* p) {
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
    return v;
}

}  // namespace

std::vector<unsigned char> byte_stage_pack(const std::vector<unsigned char>& raw) {
    std::vector<unsigned char> out;
    uLongf bound = compressBound(static_cast<uLong>(raw.size()));
    std::vector<unsigned char> deflated(bound);
    const int rc = compress2(deflated.data(), &bound, raw.empty() ? Z_NULL : raw.data(),
                             static_cast<uLong>(raw.size()), Z_BEST_COMPRESSION);
    if (rc == Z_OK && bound < raw.size()) {
        out.push_back(1);
        put_u64le(out, raw.size());
        out.insert(out.end(), deflated.data(), deflated.data() + bound);
    } else {
        out.push_back(0);
        put_u64le(out, raw.size());
        out.insert(out.end(), raw.begin(), raw.end());
    }
    return out;
}

std::vector<unsigned char> byte_stage_unpack(const unsigned char* data, size_t size) {
    if (size < 9) throw integrity_error("byte stage block truncated");
    const unsigned char mode = data[0];
    const std::uint64_t raw_size = get_u64le(data + 1);
    const unsigned char* body = data + 9;
    const size_t body_size = size - 9;
    if (mode == 0) {
        if (body_size != raw_size) throw integrity_error("byte stage identity size mismatch");
        return std::vector<unsigned char>(body, body + body_size);
    }
    if (mode != 1) throw integrity_error("byte stage: unknown mode byte");
    if (raw_size == 0) return {};
    // Deflate expands at most ~1032:1; anything above that is corrupt.
    if (raw_size > 1040 * static_cast<std::uint64_t>(body_size) + 4096) {
        throw integrity_error("byte stage corrupt (implausible inflated size)");
    }
    std::vector<unsigned char> raw(raw_size);
    uLongf got = static_cast<uLongf>(raw_size);
    const int rc = uncompress(raw.data(), &got, body, static_cast<uLong>(body_size));
    if (rc != Z_OK || got != raw_size) throw integrity_error("byte stage inflate failed");
    return raw;
}

}  // namespace csc
