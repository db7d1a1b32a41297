#include <array>
#include <cmath>
#include <cstring>
#include <numbers>

#include "csc/bitio.hpp"
#include "csc/codecs_builtin.hpp"
#include "csc/errors.hpp"

namespace csc {

namespace {

constexpr int kN = TransformCodec::kBlock;           // 4
constexpr int kCoeffs = kN * kN;                     // 16
constexpr int kFractionBits = 40;                    // block floating point precision
constexpr int kTopPlane = 42;                        // |coef| < 2^43 after the 2D transform
constexpr unsigned char kBlockZero = 0;
constexpr unsigned char kBlockCoded = 1;
constexpr unsigned char kBlockRaw = 2;

struct Dct {
    std::array<std::array<double, kN>, kN> fwd;  // orthonormal DCT-II rows
};

const Dct& dct() {
    static const Dct d = [] {
        Dct d;
        for (int k = 0; k < kN; ++k) {
            const double scale = k == 0 ? std::sqrt(1.0 / kN) : std::sqrt(2.0 / kN);
            for (int n = 0; n < kN; ++n) {
                d.fwd[k][n] = scale * std::cos((2 * n + 1) * k * std::numbers::pi / (2.0 * kN));
            }
        }
        return d;
    }();
    return d;
}

// Coefficients scanned by total frequency u+v, ties in row order.
const std::array<int, kCoeffs>& scan_order() {
    static const std::array<int, kCoeffs> order = [] {
        std::array<int, kCoeffs> o{};
        int n = 0;
        for (int total = 0; total <= 2 * (kN - 1); ++total) {
            for (int u = 0; u < kN; ++u) {
                const int v = total - u;
                if (v >= 0 && v < kN) o[n++] = u * kN + v;
            }
        }
        return o;
    }();
    return order;
}

void forward_dct2(const double in[kCoeffs], double out[kCoeffs]) {
    const auto& t = dct().fwd;
    double tmp[kCoeffs];
    for (int i = 0; i < kN; ++i) {
        for (int k = 0; k < kN; ++k) {
            double acc = 0.0;
            for (int n = 0; n < kN; ++n) acc += t[k][n] * in[i * kN + n];
            tmp[i * kN + k] = acc;
        }
    }
    for (int l = 0; l < kN; ++l) {
        for (int k = 0; k < kN; ++k) {
            double acc = 0.0;
            for (int i = 0; i < kN; ++i) acc += t[k][i] * tmp[i * kN + l];
            out[k * kN + l] = acc;
        }
    }
}

void inverse_dct2(const double in[kCoeffs], double out[kCoeffs]) {
    const auto& t = dct().fwd;
    double tmp[kCoeffs];
    for (int l = 0; l < kN; ++l) {
        for (int i = 0; i < kN; ++i) {
            double acc = 0.0;
            for (int k = 0; k < kN; ++k) acc += t[k][i] * in[k * kN + l];
            tmp[i * kN + l] = acc;
        }
    }
    for (int i = 0; i < kN; ++i) {
        for (int n = 0; n < kN; ++n) {
            double acc = 0.0;
            for (int k = 0; k < kN; ++k) acc += t[k][n] * tmp[i * kN + k];
            out[i * kN + n] = acc;
        }
    }
}

// Reconstruction from magnitudes truncated below plane `p_stop`.
void masked_values(const std::int64_t mag[kCoeffs], const int sign[kCoeffs], int p_stop,
                   int exponent, double out[kCoeffs]) {
    double coef[kCoeffs];
    for (int idx = 0; idx < kCoeffs; ++idx) {
        const std::int64_t m = p_stop >= 63 ? 0 : (mag[idx] >> p_stop) << p_stop;
        coef[idx] = static_cast<double>(sign[idx] ? -m : m);
    }
    double fixed[kCoeffs];
    inverse_dct2(coef, fixed);
    for (int idx = 0; idx < kCoeffs; ++idx) {
        out[idx] = std::ldexp(fixed[idx], exponent - kFractionBits);
    }
}

bool any_insignificant_bit(const std::int64_t mag[kCoeffs], const bool sig[kCoeffs], int plane,
                           int from_rank) {
    const auto& order = scan_order();
    for (int r = from_rank; r < kCoeffs; ++r) {
        const int idx = order[r];
        if (!sig[idx] && ((mag[idx] >> plane) & 1)) return true;
    }
    return false;
}

bool any_insignificant(const bool sig[kCoeffs], int from_rank) {
    const auto& order = scan_order();
    for (int r = from_rank; r < kCoeffs; ++r) {
        if (!sig[order[r]]) return true;
    }
    return false;
}

// One bit plane, encoder side. Mirrors decode_plane exactly.
void encode_plane(BitWriter& bits, const std::int64_t mag[kCoeffs], const int sign[kCoeffs],
                  bool sig[kCoeffs], int plane) {
    const auto& order = scan_order();
    for (int r = 0; r < kCoeffs; ++r) {
        const int idx = order[r];
        if (sig[idx]) bits.put(static_cast<unsigned>((mag[idx] >> plane) & 1));
    }
    if (!any_insignificant(sig, 0)) return;
    const bool group = any_insignificant_bit(mag, sig, plane, 0);
    bits.put(group ? 1u : 0u);
    if (!group) return;
    for (int r = 0; r < kCoeffs; ++r) {
        const int idx = order[r];
        if (sig[idx]) continue;
        const unsigned bit = static_cast<unsigned>((mag[idx] >> plane) & 1);
        bits.put(bit);
        if (bit) {
            bits.put(sign[idx] ? 1u : 0u);
            sig[idx] = true;
            if (!any_insignificant(sig, r + 1)) return;
            const bool more = any_insignificant_bit(mag, sig, plane, r + 1);
            bits.put(more ? 1u : 0u);
            if (!more) return;
        }
    }
}

// One bit plane, decoder side.
void decode_plane(BitReader& bits, std::int64_t mag[kCoeffs], int sign[kCoeffs],
                  bool sig[kCoeffs], int plane) {
    const auto& order = scan_order();
    for (int r = 0; r < kCoeffs; ++r) {
        const int idx = order[r];
        if (sig[idx]) mag[idx] |= static_cast<std::int64_t>(bits.get()) << plane;
    }
    if (!any_insignificant(sig, 0)) return;
    if (!bits.get()) return;  // group bit
    for (int r = 0; r < kCoeffs; ++r) {
        const int idx = order[r];
        if (sig[idx]) continue;
        if (bits.get()) {
            sign[idx] = static_cast<int>(bits.get());
            mag[idx] = static_cast<std::int64_t>(1) << plane;
            sig[idx] = true;
            if (!any_insignificant(sig, r + 1)) return;
            if (!bits.get()) return;  // continuation bit
        }
    }
}

void put_i16le(std::vector<unsigned char>& out, std::int16_t v) {
    out.push_back(static_cast<unsigned char>(v & 0xff));
    out.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
}

}  // namespace

std::vector<unsigned char> TransformCodec::compress_payload(const Field2D& field, double eb,
                                                            const CodecOptions&) const {
    const int nx = field.nx, ny = field.ny;
    const int bx_count = (nx + kN - 1) / kN;
    const int by_count = (ny + kN - 1) / kN;
    std::vector<unsigned char> out;
    out.reserve(field.values.size());

    // Edge-replicated fetch pads to multiples of 4 without materializing.
    auto fetch = [&](int x, int y) {
        return field.at(std::min(x, nx - 1), std::min(y, ny - 1));
    };

    for (int by = 0; by < by_count; ++by) {
        for (int bx = 0; bx < bx_count; ++bx) {
            double values[kCoeffs];
            double maxabs = 0.0;
            for (int i = 0; i < kN; ++i) {
                for (int j = 0; j < kN; ++j) {
                    values[i * kN + j] = fetch(bx * kN + j, by * kN + i);
                    maxabs = std::max(maxabs, std::abs(values[i * kN + j]));
                }
            }
            if (maxabs == 0.0) {
                out.push_back(kBlockZero);
                continue;
            }

            const int exponent = std::ilogb(maxabs) + 1;
            double fixed[kCoeffs];
            for (int idx = 0; idx < kCoeffs; ++idx) {
                fixed[idx] = static_cast<double>(
                    std::llround(std::ldexp(values[idx], kFractionBits - exponent)));
            }
            double coef[kCoeffs];
            forward_dct2(fixed, coef);
            std::int64_t mag[kCoeffs];
            int sign[kCoeffs];
            for (int idx = 0; idx < kCoeffs; ++idx) {
                const std::int64_t k = std::llround(coef[idx]);
                sign[idx] = k < 0;
                mag[idx] = k < 0 ? -k : k;
            }

            auto bound_met = [&](int p_stop) {
                double rec[kCoeffs];
                masked_values(mag, sign, p_stop, exponent, rec);
                for (int idx = 0; idx < kCoeffs; ++idx) {
                    if (!(std::abs(values[idx] - rec[idx]) <= eb)) return false;
                }
                return true;
            };

            BitWriter bits;
            bool sig[kCoeffs] = {};
            int planes_emitted = 0;
            bool met = bound_met(kTopPlane + 1);
            for (int p = kTopPlane; p >= 0 && !met; --p) {
                encode_plane(bits, mag, sign, sig, p);
                ++planes_emitted;
                met = bound_met(p);
            }
            if (!met) {
                // Full precision still misses the bound (pathological scale
                // mix); store the block verbatim.
                out.push_back(kBlockRaw);
                for (int idx = 0; idx < kCoeffs; ++idx) {
                    unsigned char b[8];
                    std::memcpy(b, &values[idx], 8);
                    out.insert(out.end(), b, b + 8);
                }
                continue;
            }
            out.push_back(kBlockCoded);
            put_i16le(out, static_cast<std::int16_t>(exponent));
            out.push_back(static_cast<unsigned char>(planes_emitted));
            const auto& payload = bits.bytes();
            out.insert(out.end(), payload.begin(), payload.end());
        }
    }
    return out;
}

Field2D TransformCodec::decompress_payload(const std::vector<unsigned char>& payload, int nx,
                                           int ny, double) const {
    const int bx_count = (nx + kN - 1) / kN;
    const int by_count = (ny + kN - 1) / kN;
    Field2D field;
    field.nx = nx;
    field.ny = ny;
    field.values.assign(static_cast<size_t>(nx) * ny, 0.0);

    size_t pos = 0;
    for (int by = 0; by < by_count; ++by) {
        for (int bx = 0; bx < bx_count; ++bx) {
            if (pos >= payload.size()) throw integrity_error("transform payload truncated");
            const unsigned char type = payload[pos++];
            double rec[kCoeffs] = {};
            if (type == kBlockZero) {
                // all zeros
            } else if (type == kBlockRaw) {
                if (pos + 8 * kCoeffs > payload.size()) {
                    throw integrity_error("transform payload truncated (raw block)");
                }
                for (int idx = 0; idx < kCoeffs; ++idx) {
                    std::memcpy(&rec[idx], payload.data() + pos, 8);
                    pos += 8;
                }
            } else if (type == kBlockCoded) {
                if (pos + 3 > payload.size()) {
                    throw integrity_error("transform payload truncated (block header)");
                }
                const std::int16_t exponent =
                    static_cast<std::int16_t>(payload[pos] | (payload[pos + 1] << 8));
                const int planes = payload[pos + 2];
                pos += 3;
                if (planes > kTopPlane + 1) {
                    throw integrity_error("transform payload corrupt (plane count)");
                }
                BitReader bits(payload.data() + pos, payload.size() - pos);
                std::int64_t mag[kCoeffs] = {};
                int sign[kCoeffs] = {};
                bool sig[kCoeffs] = {};
                for (int p = kTopPlane; p > kTopPlane - planes; --p) {
                    decode_plane(bits, mag, sign, sig, p);
                }
                pos += (bits.bits_consumed() + 7) / 8;
                masked_values(mag, sign, kTopPlane + 1 - planes, exponent, rec);
            } else {
                throw integrity_error("transform payload corrupt (block type)");
            }
            for (int i = 0; i < kN; ++i) {
                const int y = by * kN + i;
                if (y >= ny) break;
                for (int j = 0; j < kN; ++j) {
                    const int x = bx * kN + j;
                    if (x >= nx) break;
                    field.values[static_cast<size_t>(y) * nx + x] = rec[i * kN + j];
                }
            }
        }
    }
    return field;
}

}  // namespace csc
