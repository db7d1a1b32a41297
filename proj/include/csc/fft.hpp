#ifndef CSC_FFT_HPP
#define CSC_FFT_HPP

#include <complex>
#include <cstddef>
#include <vector>

namespace csc {

// In-place radix-2 FFT, unnormalized. n must be a power of two.
// inverse=true applies the conjugate kernel (still unnormalized).
void fft_pow2(std::complex<double>* data, size_t n, bool inverse);

// In-place unnormalized 2D FFT over a row-major nx-by-ny grid
// (data[iy * nx + ix]); both dimensions must be powers of two.
void fft2_pow2(std::complex<double>* data, size_t nx, size_t ny, bool inverse);

inline size_t next_pow2(size_t n) {
    size_t p = 1;
    while (p < n) p <<= 1;
    return p;
}

}  // namespace csc

#endif
