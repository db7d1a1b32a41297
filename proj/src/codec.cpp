#include "csc/codec.hpp"

#include <chrono>
#include <cmath>
#include <limits>

#include "csc/codecs_builtin.hpp"
#include "csc/errors.hpp"

namespace csc {

namespace {

const Codec* find_builtin(const std::string& codec_id) {
    static const PredictorCodec predictor;
    static const TransformCodec transform;
    static const MultilevelCodec multilevel;
    if (codec_id == "sz-like" || codec_id == "predictor") return &predictor;
    if (codec_id == "zfp-like" || codec_id == "transform") return &transform;
    if (codec_id == "mgard-like" || codec_id == "multilevel") return &multilevel;
    return nullptr;
}

}  // namespace

const Codec& builtin_codec(const std::string& codec_id) {
    const Codec* codec = find_builtin(codec_id);
    if (!codec) {
        throw parameter_error("unknown codec '" + codec_id +
                              "' (built-ins: sz-like, zfp-like, mgard-like)");
    }
    return *codec;
}

std::vector<std::string> builtin_codec_ids() {
    return {"sz-like", "zfp-like", "mgard-like"};
}

CompressedBlob compress_with(const Codec& codec, const Field2D& field, double eb,
                             const CodecOptions& options) {
    validate_field(field);
    if (!(eb > 0.0) || !std::isfinite(eb)) {
        throw validation_error("error bound must be finite and > 0, got " + std::to_string(eb));
    }
    CompressedBlob blob;
    blob.codec_id = codec.id();
    blob.nx = field.nx;
    blob.ny = field.ny;
    blob.eb = eb;
    blob.payload = codec.compress_payload(field, eb, options);
    return blob;
}

CompressedBlob compress(const CodecRequest& request) {
    return compress_with(builtin_codec(request.codec_id), request.field, request.eb,
                         request.options);
}

Field2D decompress_with(const Codec& codec, const CompressedBlob& blob) {
    if (blob.codec_id != codec.id()) {
        throw parameter_error("blob was produced by codec '" + blob.codec_id + "', not '" +
                              codec.id() + "'");
    }
    if (blob.nx < 2 || blob.ny < 2 ||
        static_cast<long long>(blob.nx) * blob.ny > (1LL << 30)) {
        throw integrity_error("blob header holds invalid dimensions");
    }
    Field2D field = codec.decompress_payload(blob.payload, blob.nx, blob.ny, blob.eb);
    field.provenance = "decompress(codec=" + blob.codec_id + ")";
    return field;
}

Field2D decompress(const CompressedBlob& blob) {
    return decompress_with(builtin_codec(blob.codec_id), blob);
}

CompressionRecord compression_metrics(const Field2D& original, const Field2D& reconstructed,
                                      const CompressedBlob& blob, double encode_seconds,
                                      double decode_seconds) {
    if (original.nx != reconstructed.nx || original.ny != reconstructed.ny) {
        throw input_error("metrics: dimension mismatch " + std::to_string(original.nx) + "x" +
                          std::to_string(original.ny) + " vs " + std::to_string(reconstructed.nx) +
                          "x" + std::to_string(reconstructed.ny));
    }
    CompressionRecord rec;
    rec.field_id = original.field_id;
    rec.codec_id = blob.codec_id;
    rec.eb = blob.eb;
    rec.original_bytes =
        static_cast<long long>(original.nx) * original.ny * static_cast<long long>(sizeof(double));
    rec.compressed_bytes = static_cast<long long>(blob.total_bytes());
    rec.compression_ratio = static_cast<double>(rec.original_bytes) / rec.compressed_bytes;
    double max_err = 0.0, sq_sum = 0.0, lo = original.values[0], hi = original.values[0];
    for (size_t i = 0; i < original.values.size(); ++i) {
        const double err = std::abs(original.values[i] - reconstructed.values[i]);
        max_err = std::max(max_err, err);
        sq_sum += (original.values[i] - reconstructed.values[i]) *
                  (original.values[i] - reconstructed.values[i]);
        lo = std::min(lo, original.values[i]);
        hi = std::max(hi, original.values[i]);
    }
    rec.max_abs_error = max_err;
    const double mse = sq_sum / static_cast<double>(original.values.size());
    const double range = hi - lo;
    rec.psnr = (mse > 0.0 && range > 0.0) ? 20.0 * std::log10(range) - 10.0 * std::log10(mse)
                                          : std::numeric_limits<double>::infinity();
    rec.encode_seconds = encode_seconds;
    rec.decode_seconds = decode_seconds;
    return rec;
}

CodecRun run_codec(const Codec& codec, const Field2D& field, double eb,
                   const CodecOptions& options) {
    using clock = std::chrono::steady_clock;
    CodecRun run;
    const auto t0 = clock::now();
    run.blob = compress_with(codec, field, eb, options);
    const auto t1 = clock::now();
    run.reconstructed = decompress_with(codec, run.blob);
    const auto t2 = clock::now();
    run.record = compression_metrics(field, run.reconstructed, run.blob,
                                     std::chrono::duration<double>(t1 - t0).count(),
                                     std::chrono::duration<double>(t2 - t1).count());
    return run;
}

}  // namespace csc
