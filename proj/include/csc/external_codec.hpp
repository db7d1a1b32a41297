#ifndef CSC_EXTERNAL_CODEC_HPP
#define CSC_EXTERNAL_CODEC_HPP

#include <string>

#include "csc/codec.hpp"

namespace csc {

// Adapter that shells out to an external compressor. Templates must contain
// {input}, {output} and {eb} placeholders; the program exchanges headerless
// raw little-endian float64 arrays through temporary files. The bound is
// re-verified by the caller like for any codec; violations surface as
// external_codec_error.
class ExternalCodec final : public Codec {
  public:
    ExternalCodec(std::string name, std::string compress_template, std::string decompress_template);

    std::string id() const override { return "external:" + name_; }
    std::vector<unsigned char> compress_payload(const Field2D& field, double eb,
                                                const CodecOptions& options) const override;
    Field2D decompress_payload(const std::vector<unsigned char>& payload, int nx, int ny,
                               double eb) const override;

  private:
    std::string name_;
    std::string compress_template_;
    std::string decompress_template_;
};

// Runs a codec end to end and enforces the bound contract, raising
// external_codec_error (external) or integrity_error (built-in) on violation.
CodecRun run_codec_checked(const Codec& codec, const Field2D& field, double eb,
                           const CodecOptions& options = {});

}  // namespace csc

#endif
