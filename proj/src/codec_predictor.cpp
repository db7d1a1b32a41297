#include <cmath>
#include <cstring>

#include "csc/byte_stage.hpp"
#include "csc/codecs_builtin.hpp"
#include "csc/errors.hpp"
#include "csc/huffman.hpp"

namespace csc {

namespace {

constexpr int kCapacity = 32767;  // 16-bit signed quantization capacity
constexpr std::uint64_t kEscapeSymbol = 0;

struct PlaneCoeffs {
    double b0 = 0.0, b1 = 0.0, b2 = 0.0;
};

// Shared by encode and decode so predictions are bit-identical.
inline double plane_eval(const PlaneCoeffs& p, int i, int j) {
    return p.b0 + p.b1 * static_cast<double>(i) + p.b2 * static_cast<double>(j);
}

inline double lorenzo_eval(const std::vector<double>& recon, int nx, int ny, int x, int y) {
    auto at = [&](int xx, int yy) -> double {
        if (xx < 0 || yy < 0 || xx >= nx || yy >= ny) return 0.0;
        return recon[static_cast<size_t>(yy) * nx + xx];
    };
    return at(x - 1, y) + at(x, y - 1) - at(x - 1, y - 1);
}

// Least-squares plane fit b0 + b1*i + b2*j over the block's original values,
// local row i and column j. Degenerate 1-wide/1-tall blocks reduce to the
// per-axis closed form (the cross moment vanishes there).
PlaneCoeffs fit_plane(const Field2D& field, int x0, int y0, int w, int h) {
    const double n = static_cast<double>(w) * h;
    double si = 0.0, sj = 0.0, sz = 0.0;
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            si += i;
            sj += j;
            sz += field.at(x0 + j, y0 + i);
        }
    }
    const double mi = si / n, mj = sj / n, mz = sz / n;
    double sii = 0.0, sjj = 0.0, sij = 0.0, siz = 0.0, sjz = 0.0;
    for (int i = 0; i < h; ++i) {
        for (int j = 0; j < w; ++j) {
            const double di = i - mi, dj = j - mj;
            const double dz = field.at(x0 + j, y0 + i) - mz;
            sii += di * di;
            sjj += dj * dj;
            sij += di * dj;
            siz += di * dz;
            sjz += dj * dz;
        }
    }
    PlaneCoeffs p;
    const double det = sii * sjj - sij * sij;
    if (std::abs(det) > 1e-12 * std::max(1.0, sii * sjj)) {
        p.b1 = (siz * sjj - sjz * sij) / det;
        p.b2 = (sjz * sii - siz * sij) / det;
    } else {
        p.b1 = sii > 0.0 ? siz / sii : 0.0;
        p.b2 = sjj > 0.0 ? sjz / sjj : 0.0;
    }
    p.b0 = mz - p.b1 * mi - p.b2 * mj;
    return p;
}

inline std::uint64_t zigzag(long long code) {
    return code >= 0 ? static_cast<std::uint64_t>(code) * 2
                     : static_cast<std::uint64_t>(-code) * 2 - 1;
}

inline long long unzigzag(std::uint64_t zz) {
    return (zz & 1) ? -static_cast<long long>((zz + 1) / 2) : static_cast<long long>(zz / 2);
}

// Quantizes one prediction error. Returns false (escape) when the code falls
// outside capacity or the reconstruction misses the bound.
inline bool quantize(double orig, double pred, double eb, long long* code, double* recon) {
    const double err = orig - pred;
    if (!(std::abs(err) <= (kCapacity + 0.49) * 2.0 * eb)) return false;
    const long long c = std::llround(err / (2.0 * eb));
    if (c < -kCapacity || c > kCapacity) return false;
    const double r = pred + static_cast<double>(c) * 2.0 * eb;
    if (!(std::abs(orig - r) <= eb)) return false;
    *code = c;
    *recon = r;
    return true;
}

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
        if (pos >= data.size()) throw integrity_error("predictor payload truncated");
        const unsigned char b = data[pos++];
        v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
        if (!(b & 0x80)) return v;
        shift += 7;
        if (shift > 63) throw integrity_error("predictor payload corrupt");
    }
}

void put_f64(std::vector<unsigned char>& out, double v) {
    unsigned char b[8];
    std::memcpy(b, &v, 8);
    out.insert(out.end(), b, b + 8);
}

double get_f64(const std::vector<unsigned char>& data, size_t& pos) {
    if (pos + 8 > data.size()) throw integrity_error("predictor payload truncated");
    double v;
    std::memcpy(&v, data.data() + pos, 8);
    pos += 8;
    return v;
}

}  // namespace

std::vector<unsigned char> PredictorCodec::compress_payload(const Field2D& field, double eb,
                                                            const CodecOptions&) const {
    const int nx = field.nx, ny = field.ny;
    const int bx_count = (nx + kBlock - 1) / kBlock;
    const int by_count = (ny + kBlock - 1) / kBlock;
    const int n_blocks = bx_count * by_count;

    std::vector<double> recon(static_cast<size_t>(nx) * ny, 0.0);
    std::vector<unsigned char> flags((n_blocks + 7) / 8, 0);
    std::vector<double> coeffs;
    std::vector<double> escapes;
    std::vector<std::uint64_t> symbols;
    symbols.reserve(field.values.size());

    struct Cell {
        long long code = 0;
        bool escape = false;
        double value = 0.0;
    };
    std::vector<Cell> trial(static_cast<size_t>(kBlock) * kBlock);

    int block_index = 0;
    for (int by = 0; by < by_count; ++by) {
        for (int bx = 0; bx < bx_count; ++bx, ++block_index) {
            const int x0 = bx * kBlock, y0 = by * kBlock;
            const int w = std::min(kBlock, nx - x0), h = std::min(kBlock, ny - y0);

            // Trial Lorenzo pass over a block-local reconstruction.
            double sae_lorenzo = 0.0;
            for (int i = 0; i < h; ++i) {
                for (int j = 0; j < w; ++j) {
                    const int x = x0 + j, y = y0 + i;
                    // Current-block neighbors come from the trial cells.
                    auto trial_at = [&](int xx, int yy) -> double {
                        if (xx < 0 || yy < 0 || xx >= nx || yy >= ny) return 0.0;
                        if (xx >= x0 && xx < x0 + w && yy >= y0 && yy < y0 + h) {
                            return trial[static_cast<size_t>(yy - y0) * kBlock + (xx - x0)].value;
                        }
                        return recon[static_cast<size_t>(yy) * nx + xx];
                    };
                    const double pred =
                        trial_at(x - 1, y) + trial_at(x, y - 1) - trial_at(x - 1, y - 1);
                    const double orig = field.at(x, y);
                    sae_lorenzo += std::abs(orig - pred);
                    Cell& cell = trial[static_cast<size_t>(i) * kBlock + j];
                    if (quantize(orig, pred, eb, &cell.code, &cell.value)) {
                        cell.escape = false;
                    } else {
                        cell.escape = true;
                        cell.value = orig;
                    }
                }
            }

            const PlaneCoeffs plane = fit_plane(field, x0, y0, w, h);
            double sae_plane = 0.0;
            for (int i = 0; i < h; ++i) {
                for (int j = 0; j < w; ++j) {
                    sae_plane += std::abs(field.at(x0 + j, y0 + i) - plane_eval(plane, i, j));
                }
            }

            const bool use_plane = sae_plane <= sae_lorenzo;
            if (use_plane) {
                flags[block_index / 8] |= static_cast<unsigned char>(1u << (block_index % 8));
                coeffs.push_back(plane.b0);
                coeffs.push_back(plane.b1);
                coeffs.push_back(plane.b2);
                for (int i = 0; i < h; ++i) {
                    for (int j = 0; j < w; ++j) {
                        const int x = x0 + j, y = y0 + i;
                        const double orig = field.at(x, y);
                        const double pred = plane_eval(plane, i, j);
                        long long code;
                        double r;
                        if (quantize(orig, pred, eb, &code, &r)) {
                            symbols.push_back(zigzag(code) + 1);
                            recon[static_cast<size_t>(y) * nx + x] = r;
                        } else {
                            symbols.push_back(kEscapeSymbol);
                            escapes.push_back(orig);
                            recon[static_cast<size_t>(y) * nx + x] = orig;
                        }
                    }
                }
            } else {
                for (int i = 0; i < h; ++i) {
                    for (int j = 0; j < w; ++j) {
                        const Cell& cell = trial[static_cast<size_t>(i) * kBlock + j];
                        if (cell.escape) {
                            symbols.push_back(kEscapeSymbol);
                            escapes.push_back(cell.value);
                        } else {
                            symbols.push_back(zigzag(cell.code) + 1);
                        }
                        recon[static_cast<size_t>(y0 + i) * nx + (x0 + j)] = cell.value;
                    }
                }
            }
        }
    }

    std::vector<unsigned char> raw;
    raw.insert(raw.end(), flags.begin(), flags.end());
    for (double c : coeffs) put_f64(raw, c);
    put_varint(raw, escapes.size());
    for (double e : escapes) put_f64(raw, e);
    const std::vector<unsigned char> huff = huffman_encode(symbols);
    raw.insert(raw.end(), huff.begin(), huff.end());
    return byte_stage_pack(raw);
}

Field2D PredictorCodec::decompress_payload(const std::vector<unsigned char>& payload, int nx,
                                           int ny, double eb) const {
    const std::vector<unsigned char> raw = byte_stage_unpack(payload.data(), payload.size());
    const int bx_count = (nx + kBlock - 1) / kBlock;
    const int by_count = (ny + kBlock - 1) / kBlock;
    const int n_blocks = bx_count * by_count;
    const size_t flag_bytes = static_cast<size_t>((n_blocks + 7) / 8);
    if (raw.size() < flag_bytes) throw integrity_error("predictor payload truncated (flags)");

    int n_plane_blocks = 0;
    for (int b = 0; b < n_blocks; ++b) {
        if (raw[b / 8] & (1u << (b % 8))) ++n_plane_blocks;
    }
    size_t pos = flag_bytes;
    std::vector<PlaneCoeffs> planes(n_plane_blocks);
    for (auto& p : planes) {
        p.b0 = get_f64(raw, pos);
        p.b1 = get_f64(raw, pos);
        p.b2 = get_f64(raw, pos);
    }
    const std::uint64_t n_escapes = get_varint(raw, pos);
    if (n_escapes > (raw.size() - pos) / 8) {
        throw integrity_error("predictor payload corrupt (escape count exceeds stream)");
    }
    std::vector<double> escapes(n_escapes);
    for (auto& e : escapes) e = get_f64(raw, pos);

    size_t huff_consumed = 0;
    const std::vector<std::uint64_t> symbols =
        huffman_decode(raw.data() + pos, raw.size() - pos, &huff_consumed);
    if (symbols.size() != static_cast<size_t>(nx) * ny) {
        throw integrity_error("predictor payload corrupt: symbol count mismatch");
    }

    Field2D field;
    field.nx = nx;
    field.ny = ny;
    field.values.assign(static_cast<size_t>(nx) * ny, 0.0);

    size_t sym_index = 0, escape_index = 0;
    int plane_index = 0, block_index = 0;
    for (int by = 0; by < by_count; ++by) {
        for (int bx = 0; bx < bx_count; ++bx, ++block_index) {
            const int x0 = bx * kBlock, y0 = by * kBlock;
            const int w = std::min(kBlock, nx - x0), h = std::min(kBlock, ny - y0);
            const bool use_plane = raw[block_index / 8] & (1u << (block_index % 8));
            const PlaneCoeffs* plane = use_plane ? &planes[plane_index++] : nullptr;
            for (int i = 0; i < h; ++i) {
                for (int j = 0; j < w; ++j) {
                    const int x = x0 + j, y = y0 + i;
                    const std::uint64_t sym = symbols[sym_index++];
                    double value;
                    if (sym == kEscapeSymbol) {
                        if (escape_index >= escapes.size()) {
                            throw integrity_error("predictor payload corrupt: escape underflow");
                        }
                        value = escapes[escape_index++];
                    } else {
                        const double pred = use_plane
                                                ? plane_eval(*plane, i, j)
                                                : lorenzo_eval(field.values, nx, ny, x, y);
                        value = pred + static_cast<double>(unzigzag(sym - 1)) * 2.0 * eb;
                    }
                    field.values[static_cast<size_t>(y) * nx + x] = value;
                }
            }
        }
    }
    return field;
}

}  // namespace csc
