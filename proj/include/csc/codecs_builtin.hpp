#ifndef CSC_CODECS_BUILTIN_HPP
#define CSC_CODECS_BUILTIN_HPP

#include "csc/codec.hpp"

namespace csc {

// Predictor codec ("sz-like"): raster scan of 16x16 blocks; per block the
// better of a Lorenzo predictor over reconstructed values and a least-squares
// plane fit over original values (coefficients stored verbatim); prediction
// errors linearly quantized with bin 2*eb, 16-bit code capacity with an
// escape to exact storage; Huffman coding plus the lossless byte stage.
class PredictorCodec final : public Codec {
  public:
    static constexpr int kBlock = 16;
    std::string id() const override { return "sz-like"; }
    std::vector<unsigned char> compress_payload(const Field2D& field, double eb,
                                                const CodecOptions& options) const override;
    Field2D decompress_payload(const std::vector<unsigned char>& payload, int nx, int ny,
                               double eb) const override;
};

// Transform codec ("zfp-like"): 4x4 blocks, block floating point into signed
// fixed point, separable orthonormal 4-point DCT-II, coefficients ordered by
// total frequency, sign-magnitude bit planes emitted most significant first
// until an in-loop decode meets the bound; per-block plane count stored.
class TransformCodec final : public Codec {
  public:
    static constexpr int kBlock = 4;
    std::string id() const override { return "zfp-like"; }
    std::vector<unsigned char> compress_payload(const Field2D& field, double eb,
                                                const CodecOptions& options) const override;
    Field2D decompress_payload(const std::vector<unsigned char>& payload, int nx, int ny,
                               double eb) const override;
};

// Multilevel codec ("mgard-like", simplified stand-in): orthonormal 2D Haar
// decomposition, uniform coefficient quantization with a shrinking bin until
// the decoded field meets the bound, plus a sparse exact-residual patch list;
// Huffman coding and the lossless byte stage.
class MultilevelCodec final : public Codec {
  public:
    std::string id() const override { return "mgard-like"; }
    std::vector<unsigned char> compress_payload(const Field2D& field, double eb,
                                                const CodecOptions& options) const override;
    Field2D decompress_payload(const std::vector<unsigned char>& payload, int nx, int ny,
                               double eb) const override;
};

// Number of Haar levels the multilevel codec applies to an nx-by-ny field.
int multilevel_levels(int nx, int ny);

}  // namespace csc

#endif
