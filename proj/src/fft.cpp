#include "csc/fft.hpp"

#include <cmath>
#include <numbers>

#include "csc/errors.hpp"

namespace csc {

void fft_pow2(std::complex<double>* data, size_t n, bool inverse) {
    if (n == 0 || (n & (n - 1)) != 0) {
        throw parameter_error("fft_pow2: length must be a power of two, got " + std::to_string(n));
    }
    // Bit-reversal permutation.
    for (size_t i = 1, j = 0; i < n; ++i) {
        size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(data[i], data[j]);
    }
    const double sign = inverse ? 1.0 : -1.0;
    for (size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        const std::complex<double> wlen(std::cos(ang), std::sin(ang));
        for (size_t i = 0; i < n; i += len) {
            std::complex<double> w(1.0, 0.0);
            for (size_t k = 0; k < len / 2; ++k) {
                const std::complex<double> u = data[i + k];
                const std::complex<double> v = data[i + k + len / 2] * w;
                data[i + k] = u + v;
                data[i + k + len / 2] = u - v;
                w *= wlen;
            }
        }
    }
}

void fft2_pow2(std::complex<double>* data, size_t nx, size_t ny, bool inverse) {
    for (size_t iy = 0; iy < ny; ++iy) {
        fft_pow2(data + iy * nx, nx, inverse);
    }
    std::vector<std::complex<double>> col(ny);
    for (size_t ix = 0; ix < nx; ++ix) {
        for (size_t iy = 0; iy < ny; ++iy) col[iy] = data[iy * nx + ix];
        fft_pow2(col.data(), ny, inverse);
        for (size_t iy = 0; iy < ny; ++iy) data[iy * nx + ix] = col[iy];
    }
}

}  // namespace csc
