#ifndef CSC_BITIO_HPP
#define CSC_BITIO_HPP

#include <cstdint>
#include <vector>

#include "csc/errors.hpp"

namespace csc {

// MSB-first bit packing.
class BitWriter {
  public:
    void put(unsigned bit) {
        if (shift_ == 0) {
            bytes_.push_back(0);
            shift_ = 8;
        }
        --shift_;
        if (bit) bytes_.back() |= static_cast<unsigned char>(1u << shift_);
        ++bit_count_;
    }

    void put_bits(std::uint64_t value, int width) {
        for (int b = width - 1; b >= 0; --b) put(static_cast<unsigned>((value >> b) & 1u));
    }

    std::uint64_t bit_count() const { return bit_count_; }
    const std::vector<unsigned char>& bytes() const { return bytes_; }
    std::vector<unsigned char> take() { return std::move(bytes_); }

  private:
    std::vector<unsigned char> bytes_;
    int shift_ = 0;
    std::uint64_t bit_count_ = 0;
};

class BitReader {
  public:
    BitReader(const unsigned char* data, size_t size) : data_(data), size_(size) {}

    unsigned get() {
        const size_t byte = pos_ >> 3;
        if (byte >= size_) throw integrity_error("bitstream truncated");
        const unsigned bit = (data_[byte] >> (7 - (pos_ & 7))) & 1u;
        ++pos_;
        return bit;
    }

    std::uint64_t get_bits(int width) {
        std::uint64_t v = 0;
        for (int b = 0; b < width; ++b) v = (v << 1) | get();
        return v;
    }

    size_t bits_consumed() const { return pos_; }

  private:
    const unsigned char* data_;
    size_t size_;
    size_t pos_ = 0;
};

}  // namespace csc

#endif
