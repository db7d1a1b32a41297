#ifndef CSC_CODEC_HPP
#define CSC_CODEC_HPP

#include <map>
#include <memory>
#include <string>
#include <vector>

#include "csc/blob.hpp"
#include "csc/field.hpp"

namespace csc {

using CodecOptions = std::map<std::string, std::string>;

struct CodecRequest {
    Field2D field;
    double eb = 0.0;  // absolute error bound, > 0
    std::string codec_id = "sz-like";
    CodecOptions options;
};

// One (field, codec, error bound) outcome.
struct CompressionRecord {
    std::string field_id;
    std::string codec_id;
    double eb = 0.0;
    long long original_bytes = 0;
    long long compressed_bytes = 0;
    double compression_ratio = 0.0;
    double max_abs_error = 0.0;
    double psnr = 0.0;
    double encode_seconds = 0.0;
    double decode_seconds = 0.0;
};

// Error-bounded codec contract: decompress(compress(f)) differs from f by at
// most eb at every grid point, and both directions are deterministic.
class Codec {
  public:
    virtual ~Codec() = default;
    virtual std::string id() const = 0;
    virtual std::vector<unsigned char> compress_payload(const Field2D& field, double eb,
                                                        const CodecOptions& options) const = 0;
    virtual Field2D decompress_payload(const std::vector<unsigned char>& payload, int nx, int ny,
                                       double eb) const = 0;
};

// Built-in codecs: "sz-like" (block predictor + quantization + entropy
// coding), "zfp-like" (block transform + embedded bit planes), "mgard-like"
// (multilevel decomposition, simplified). Aliases predictor/transform/
// multilevel are accepted. Throws parameter_error for unknown ids.
const Codec& builtin_codec(const std::string& codec_id);
std::vector<std::string> builtin_codec_ids();

CompressedBlob compress(const CodecRequest& request);
CompressedBlob compress_with(const Codec& codec, const Field2D& field, double eb,
                             const CodecOptions& options = {});
Field2D decompress(const CompressedBlob& blob);                      // built-in codecs only
Field2D decompress_with(const Codec& codec, const CompressedBlob& blob);

CompressionRecord compression_metrics(const Field2D& original, const Field2D& reconstructed,
                                      const CompressedBlob& blob, double encode_seconds = 0.0,
                                      double decode_seconds = 0.0);

// Compress, decompress and measure in one step (wall-clock timings included).
struct CodecRun {
    CompressedBlob blob;
    Field2D reconstructed;
    CompressionRecord record;
};
CodecRun run_codec(const Codec& codec, const Field2D& field, double eb,
                   const CodecOptions& options = {});

}  // namespace csc

#endif
