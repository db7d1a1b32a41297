#include <cmath>
#include <cstring>
#include <limits>

#include "csc/byte_stage.hpp"
#include "csc/codecs_builtin.hpp"
#include "csc/errors.hpp"
#include "csc/fft.hpp"  // next_pow2
#include "csc/huffman.hpp"

namespace csc {

namespace {

constexpr int kMaxHalvings = 6;
constexpr unsigned char kFlagExperimental = 0x01;  // simplified MGARD stand-in
const double kInvSqrt2 = 1.0 / std::sqrt(2.0);

void put_varint(std::vector<unsigned char>& out, std::uint64_t v) {
    while (v >= 0x80) {
        out.push_back(static_cast<unsigned char>(v) | 0x80);
        v >>= 7;
    }
    out.push_back(static_cast<unsigned char>(v));
}

std::uint64_t get_varint(const std::vector<unsigned char>& data, size_t& pos) {
    std::uint64_t v = 0;
    int shift = 0;
    while (true) {
        if (pos >= data.size()) throw integrity_error("multilevel payload truncated");
        const unsigned char b = data[pos++];
        v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
        if (!(b & 0x80)) return v;
        shift += 7;
        if (shift > 63) throw integrity_error("multilevel payload corrupt");
    }
}

inline std::uint64_t zigzag(long long code) {
    return code >= 0 ? static_cast<std::uint64_t>(code) * 2
                     : static_cast<std::uint64_t>(-code) * 2 - 1;
}

inline long long unzigzag(std::uint64_t zz) {
    return (zz & 1) ? -static_cast<long long>((zz + 1) / 2) : static_cast<long long>(zz / 2);
}

// Orthonormal Haar analysis/synthesis over the leading w entries of a row or
// column, scratch-buffered. Averages land in [0, w/2), details in [w/2, w).
void haar_step(double* data, size_t stride, int w, std::vector<double>& scratch, bool inverse) {
    const int half = w / 2;
    if (inverse) {
        for (int i = 0; i < half; ++i) {
            const double s = data[static_cast<size_t>(i) * stride];
            const double d = data[static_cast<size_t>(i + half) * stride];
            scratch[2 * i] = (s + d) * kInvSqrt2;
            scratch[2 * i + 1] = (s - d) * kInvSqrt2;
        }
    } else {
        for (int i = 0; i < half; ++i) {
            const double a = data[static_cast<size_t>(2 * i) * stride];
            const double b = data[static_cast<size_t>(2 * i + 1) * stride];
            scratch[i] = (a + b) * kInvSqrt2;
            scratch[i + half] = (a - b) * kInvSqrt2;
        }
    }
    for (int i = 0; i < w; ++i) data[static_cast<size_t>(i) * stride] = scratch[i];
}

void haar_2d(std::vector<double>& grid, int px, int py, int levels, bool inverse) {
    std::vector<double> scratch(static_cast<size_t>(std::max(px, py)));
    if (!inverse) {
        int w = px, h = py;
        for (int level = 0; level < levels; ++level) {
            for (int iy = 0; iy < h; ++iy) haar_step(&grid[static_cast<size_t>(iy) * px], 1, w, scratch, false);
            for (int ix = 0; ix < w; ++ix) haar_step(&grid[ix], static_cast<size_t>(px), h, scratch, false);
            w /= 2;
            h /= 2;
        }
    } else {
        int w = px >> levels, h = py >> levels;
        for (int level = 0; level < levels; ++level) {
            w *= 2;
            h *= 2;
            for (int ix = 0; ix < w; ++ix) haar_step(&grid[ix], static_cast<size_t>(px), h, scratch, true);
            for (int iy = 0; iy < h; ++iy) haar_step(&grid[static_cast<size_t>(iy) * px], 1, w, scratch, true);
        }
    }
}

}  // namespace

int multilevel_levels(int nx, int ny) {
    const int m = std::min(nx, ny);
    int levels = 0;
    while ((1 << (levels + 1)) <= m) ++levels;
    return levels;
}

std::vector<unsigned char> MultilevelCodec::compress_payload(const Field2D& field, double eb,
                                                             const CodecOptions&) const {
    const int nx = field.nx, ny = field.ny;
    const int px = static_cast<int>(next_pow2(static_cast<size_t>(nx)));
    const int py = static_cast<int>(next_pow2(static_cast<size_t>(ny)));
    const int levels = multilevel_levels(nx, ny);

    // Edge-replicated padding to the power-of-two working grid.
    std::vector<double> padded(static_cast<size_t>(px) * py);
    for (int iy = 0; iy < py; ++iy) {
        const int sy = std::min(iy, ny - 1);
        for (int ix = 0; ix < px; ++ix) {
            padded[static_cast<size_t>(iy) * px + ix] = field.at(std::min(ix, nx - 1), sy);
        }
    }
    std::vector<double> coef = padded;
    haar_2d(coef, px, py, levels, false);

    const double initial_bin = 2.0 * eb / (levels + 1);
    std::vector<long long> codes(coef.size());
    std::vector<double> recon;
    int halvings = 0;
    for (;; ++halvings) {
        const double bin = std::ldexp(initial_bin, -halvings);
        for (size_t i = 0; i < coef.size(); ++i) {
            const double q = coef[i] / bin;
            if (!(std::abs(q) < 4.0e18)) {
                throw parameter_error(
                    "multilevel codec: error bound too small relative to data magnitude");
            }
            codes[i] = std::llround(q);
        }
        recon.resize(coef.size());
        for (size_t i = 0; i < coef.size(); ++i) recon[i] = static_cast<double>(codes[i]) * bin;
        haar_2d(recon, px, py, levels, true);
        if (halvings >= kMaxHalvings) break;
        bool ok = true;
        for (int iy = 0; iy < ny && ok; ++iy) {
            for (int ix = 0; ix < nx; ++ix) {
                if (!(std::abs(field.at(ix, iy) - recon[static_cast<size_t>(iy) * px + ix]) <= eb)) {
                    ok = false;
                    break;
                }
            }
        }
        if (ok) break;
    }

    // Any pixel still outside the bound is patched with its exact residual.
    // The stored residual is nudged by ulps if rounding in rec + residual
    // leaves a sliver; when even that cannot reach the bound the request is
    // below representable precision at this magnitude.
    std::vector<std::pair<std::uint32_t, double>> patches;
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            const double orig = field.at(ix, iy);
            const double rec = recon[static_cast<size_t>(iy) * px + ix];
            if (!(std::abs(orig - rec) <= eb)) {
                double residual = orig - rec;
                for (int step = 0; step < 8 && !(std::abs(orig - (rec + residual)) <= eb);
                     ++step) {
                    residual = std::nextafter(
                        residual, orig - (rec + residual) > 0.0
                                      ? std::numeric_limits<double>::infinity()
                                      : -std::numeric_limits<double>::infinity());
                }
                if (!(std::abs(orig - (rec + residual)) <= eb)) {
                    throw parameter_error(
                        "multilevel codec: error bound is below representable precision for "
                        "values of this magnitude");
                }
                patches.emplace_back(static_cast<std::uint32_t>(iy) * nx + ix, residual);
            }
        }
    }

    std::vector<std::uint64_t> symbols(codes.size());
    for (size_t i = 0; i < codes.size(); ++i) symbols[i] = zigzag(codes[i]);

    std::vector<unsigned char> raw;
    raw.push_back(kFlagExperimental);
    raw.push_back(static_cast<unsigned char>(halvings));
    put_varint(raw, patches.size());
    for (const auto& [pos, residual] : patches) {
        for (int i = 0; i < 4; ++i) raw.push_back(static_cast<unsigned char>(pos >> (8 * i)));
        unsigned char b[8];
        std::memcpy(b, &residual, 8);
        raw.insert(raw.end(), b, b + 8);
    }
    const std::vector<unsigned char> huff = huffman_encode(symbols);
    raw.insert(raw.end(), huff.begin(), huff.end());
    return byte_stage_pack(raw);
}

Field2D MultilevelCodec::decompress_payload(const std::vector<unsigned char>& payload, int nx,
                                            int ny, double eb) const {
    const std::vector<unsigned char> raw = byte_stage_unpack(payload.data(), payload.size());
    const int px = static_cast<int>(next_pow2(static_cast<size_t>(nx)));
    const int py = static_cast<int>(next_pow2(static_cast<size_t>(ny)));
    const int levels = multilevel_levels(nx, ny);

    size_t pos = 0;
    if (raw.size() < 2) throw integrity_error("multilevel payload truncated");
    const unsigned char flags = raw[pos++];
    if (!(flags & kFlagExperimental)) {
        throw integrity_error("multilevel payload corrupt (flag byte)");
    }
    const int halvings = raw[pos++];
    const std::uint64_t n_patches = get_varint(raw, pos);
    if (n_patches > (raw.size() - pos) / 12) {
        throw integrity_error("multilevel payload corrupt (patch count exceeds stream)");
    }
    std::vector<std::pair<std::uint32_t, double>> patches(n_patches);
    for (auto& [patch_pos, residual] : patches) {
        if (pos + 12 > raw.size()) throw integrity_error("multilevel payload truncated (patches)");
        patch_pos = 0;
        for (int i = 0; i < 4; ++i) patch_pos |= static_cast<std::uint32_t>(raw[pos + i]) << (8 * i);
        std::memcpy(&residual, raw.data() + pos + 4, 8);
        pos += 12;
    }
    const std::vector<std::uint64_t> symbols = huffman_decode(raw.data() + pos, raw.size() - pos);
    if (symbols.size() != static_cast<size_t>(px) * py) {
        throw integrity_error("multilevel payload corrupt: coefficient count mismatch");
    }

    const double bin = std::ldexp(2.0 * eb / (levels + 1), -halvings);
    std::vector<double> recon(symbols.size());
    for (size_t i = 0; i < symbols.size(); ++i) {
        recon[i] = static_cast<double>(unzigzag(symbols[i])) * bin;
    }
    haar_2d(recon, px, py, levels, true);

    Field2D field;
    field.nx = nx;
    field.ny = ny;
    field.values.resize(static_cast<size_t>(nx) * ny);
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = 0; ix < nx; ++ix) {
            field.values[static_cast<size_t>(iy) * nx + ix] = recon[static_cast<size_t>(iy) * px + ix];
        }
    }
    for (const auto& [patch_pos, residual] : patches) {
        if (patch_pos >= field.values.size()) {
            throw integrity_error("multilevel payload corrupt: patch position out of range");
        }
        field.values[patch_pos] += residual;
    }
    return field;
}

}  // namespace csc
