#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "csc/byte_stage.hpp"
#include "csc/codec.hpp"
#include "csc/codecs_builtin.hpp"
#include "csc/errors.hpp"
#include "csc/external_codec.hpp"
#include "csc/huffman.hpp"
#include "test_support.hpp"

using namespace csc;

namespace {

Field2D uniform01_field(int nx, int ny, std::uint64_t seed) {
    Field2D f;
    f.nx = nx;
    f.ny = ny;
    f.values.resize(static_cast<size_t>(nx) * ny);
    f.field_id = "u01_" + std::to_string(seed);
    std::mt19937_64 rng(seed);
    for (double& v : f.values) v = static_cast<double>(rng() >> 11) * 0x1p-53;
    return f;
}

double max_abs_diff(const Field2D& a, const Field2D& b) {
    double m = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i) {
        m = std::max(m, std::abs(a.values[i] - b.values[i]));
    }
    return m;
}

}  // namespace

TEST_SUITE("codecs") {

TEST_CASE("huffman stage round-trips losslessly") {
    std::mt19937_64 rng(5);
    SUBCASE("random streams over mixed alphabets") {
        for (int trial = 0; trial < 10; ++trial) {
            std::vector<std::uint64_t> symbols(1 + (rng() % 5000));
            const std::uint64_t alphabet = 1 + (rng() % 300);
            for (auto& s : symbols) s = rng() % alphabet + (trial % 2 ? 1u << 20 : 0u);
            const std::vector<unsigned char> bytes = huffman_encode(symbols);
            size_t consumed = 0;
            CHECK(huffman_decode(bytes.data(), bytes.size(), &consumed) == symbols);
            CHECK(consumed == bytes.size());
        }
    }
    SUBCASE("single-symbol alphabet") {
        std::vector<std::uint64_t> symbols(1000, 42);
        const std::vector<unsigned char> bytes = huffman_encode(symbols);
        CHECK(huffman_decode(bytes.data(), bytes.size()) == symbols);
        CHECK(bytes.size() < 200);  // 1000 one-bit codes plus table
    }
    SUBCASE("empty stream") {
        const std::vector<unsigned char> bytes = huffman_encode({});
        CHECK(huffman_decode(bytes.data(), bytes.size()).empty());
    }
    SUBCASE("truncation raises an integrity error") {
        std::vector<std::uint64_t> symbols(256);
        for (size_t i = 0; i < symbols.size(); ++i) symbols[i] = i % 17;
        std::vector<unsigned char> bytes = huffman_encode(symbols);
        bytes.resize(bytes.size() / 2);
        CHECK_THROWS_AS(huffman_decode(bytes.data(), bytes.size()), integrity_error);
    }
}

TEST_CASE("byte stage round-trips losslessly and flags the identity path") {
    std::mt19937_64 rng(6);
    SUBCASE("compressible input takes the deflate path") {
        std::vector<unsigned char> raw(20000);
        for (size_t i = 0; i < raw.size(); ++i) raw[i] = static_cast<unsigned char>(i % 5);
        const std::vector<unsigned char> packed = byte_stage_pack(raw);
        CHECK(packed[0] == 1);
        CHECK(packed.size() < raw.size() / 4);
        CHECK(byte_stage_unpack(packed.data(), packed.size()) == raw);
    }
    SUBCASE("incompressible input falls back to identity, flagged in the header") {
        std::vector<unsigned char> raw(4096);
        for (auto& b : raw) b = static_cast<unsigned char>(rng());
        const std::vector<unsigned char> packed = byte_stage_pack(raw);
        CHECK(packed[0] == 0);
        CHECK(packed.size() == raw.size() + 9);
        CHECK(byte_stage_unpack(packed.data(), packed.size()) == raw);
    }
    SUBCASE("empty input") {
        const std::vector<unsigned char> packed = byte_stage_pack({});
        CHECK(byte_stage_unpack(packed.data(), packed.size()).empty());
    }
}

TEST_CASE("blob container round-trips its header exactly") {
    CompressedBlob blob;
    blob.codec_id = "sz-like";
    blob.nx = 123;
    blob.ny = 77;
    blob.eb = 1e-4;
    blob.payload = {1, 2, 3, 4, 5};
    const std::vector<unsigned char> bytes = blob.serialize();
    CHECK(bytes.size() == blob.total_bytes());
    const CompressedBlob back = parse_blob(bytes);
    CHECK(back.codec_id == blob.codec_id);
    CHECK(back.nx == 123);
    CHECK(back.ny == 77);
    CHECK(back.eb == 1e-4);
    CHECK(back.payload == blob.payload);

    SUBCASE("magic mismatch") {
        std::vector<unsigned char> bad = bytes;
        bad[0] = 'X';
        CHECK_THROWS_AS(parse_blob(bad), integrity_error);
    }
    SUBCASE("version mismatch") {
        std::vector<unsigned char> bad = bytes;
        bad[4] = 99;
        CHECK_THROWS_AS(parse_blob(bad), version_error);
    }
    SUBCASE("truncated") {
        std::vector<unsigned char> bad(bytes.begin(), bytes.begin() + 10);
        CHECK_THROWS_AS(parse_blob(bad), integrity_error);
    }
}

TEST_CASE("every builtin codec honors the bound on varied fields") {
    const std::vector<Field2D> fields = {
        testsupport::single_range_grf(96, 80, 6.0, 1),
        testsupport::white_noise_field(96, 80, 2),
        testsupport::constant_field(96, 80, 1.5),
        testsupport::half_and_half_field(96, 80, 2.0, 12.0, 3),
    };
    for (const auto& id : builtin_codec_ids()) {
        const Codec& codec = builtin_codec(id);
        for (const auto& field : fields) {
            for (double eb : {1e-4, 1e-2}) {
                const CodecRun run = run_codec(codec, field, eb);
                INFO(id, " on ", field.field_id, " eb ", eb);
                CHECK(run.record.max_abs_error <= eb);
                CHECK(run.reconstructed.nx == field.nx);
                CHECK(run.reconstructed.ny == field.ny);
            }
        }
    }
}

TEST_CASE("identical requests produce identical payload bytes") {
    const Field2D field = testsupport::single_range_grf(64, 64, 4.0, 12);
    for (const auto& id : builtin_codec_ids()) {
        const Codec& codec = builtin_codec(id);
        const CompressedBlob a = compress_with(codec, field, 1e-3);
        const CompressedBlob b = compress_with(codec, field, 1e-3);
        CHECK(a.payload == b.payload);
        CHECK(a.serialize() == b.serialize());
    }
}

TEST_CASE("constant fields compress to a tiny fraction of their size") {
    const Field2D field = testsupport::constant_field(256, 256, 1.5);
    for (const auto& id : builtin_codec_ids()) {
        const CodecRun run = run_codec(builtin_codec(id), field, 1e-3);
        INFO(id, " CR ", run.record.compression_ratio);
        CHECK(run.record.max_abs_error <= 1e-3);
        CHECK(run.record.compression_ratio > 20.0);
    }
}

TEST_CASE("reconstruction fixed point: predictor and multilevel re-quantize to themselves") {
    const Field2D field = testsupport::single_range_grf(128, 128, 8.0, 3);
    for (const std::string id : {"sz-like", "mgard-like"}) {
        const Codec& codec = builtin_codec(id);
        const CompressedBlob first = compress_with(codec, field, 1e-3);
        const Field2D recon = decompress_with(codec, first);
        const CompressedBlob second = compress_with(codec, recon, 1e-3);
        INFO("codec ", id);
        CHECK(second.payload == first.payload);
        const Field2D recon2 = decompress_with(codec, second);
        CHECK(recon2.values == recon.values);
    }
    // The transform codec re-derives its block floating point from the
    // reconstruction, so exact idempotence is not attainable; the bound
    // contract still chains.
    const Codec& transform = builtin_codec("zfp-like");
    const Field2D recon = decompress_with(transform, compress_with(transform, field, 1e-3));
    const Field2D recon2 = decompress_with(transform, compress_with(transform, recon, 1e-3));
    CHECK(max_abs_diff(recon, recon2) <= 1e-3);
}

TEST_CASE("predictor codec: exact plane field yields all-zero codes and a huge ratio") {
    Field2D plane;
    plane.nx = 256;
    plane.ny = 256;
    plane.field_id = "plane";
    plane.values.resize(65536);
    for (int i = 0; i < 256; ++i) {
        for (int j = 0; j < 256; ++j) plane.values[static_cast<size_t>(i) * 256 + j] = 1.0 + 0.5 * i - 0.25 * j;
    }
    const CodecRun run = run_codec(builtin_codec("sz-like"), plane, 1e-3);
    CHECK(run.record.compression_ratio > 50.0);
    CHECK(run.record.max_abs_error <= 1e-3);
}

TEST_CASE("predictor codec: block size follows the 16x16 layout") {
    CHECK(PredictorCodec::kBlock == 16);
}

TEST_CASE("predictor codec: white noise at a tight bound is near incompressible") {
    const Field2D noise = uniform01_field(256, 256, 9);
    const CodecRun run = run_codec(builtin_codec("sz-like"), noise, 1e-5);
    INFO("CR ", run.record.compression_ratio);
    CHECK(run.record.max_abs_error <= 1e-5);
    CHECK(run.record.compression_ratio >= 1.0);
    CHECK(run.record.compression_ratio <= 5.0);
}

TEST_CASE("predictor codec: a vanishing bound pushes every value down the escape path") {
    const Field2D noise = uniform01_field(128, 128, 10);
    const CodecRun run = run_codec(builtin_codec("sz-like"), noise, 1e-300);
    // All escapes: reconstruction is exact and the ratio approaches the
    // lossless stage's ratio on raw doubles.
    CHECK(run.record.max_abs_error == 0.0);
    CHECK(run.record.compression_ratio >= 0.9);
    CHECK(run.record.compression_ratio <= 1.3);
}

TEST_CASE("transform codec: 4x4 blocks, zero blocks cost one byte") {
    CHECK(TransformCodec::kBlock == 4);
    Field2D zero;
    zero.nx = 64;
    zero.ny = 64;
    zero.field_id = "zero";
    zero.values.assign(4096, 0.0);
    const CompressedBlob blob = compress_with(builtin_codec("zfp-like"), zero, 1e-3);
    CHECK(blob.payload.size() == 256);  // 16x16 blocks, 1 marker byte each
    const Field2D recon = decompress_with(builtin_codec("zfp-like"), blob);
    for (double v : recon.values) CHECK(v == 0.0);
}

TEST_CASE("transform codec: random field bound verified by exhaustive comparison") {
    const Field2D field = uniform01_field(64, 64, 11);
    const CodecRun run = run_codec(builtin_codec("zfp-like"), field, 1e-3);
    double worst = 0.0;
    for (size_t i = 0; i < field.values.size(); ++i) {
        worst = std::max(worst, std::abs(field.values[i] - run.reconstructed.values[i]));
    }
    CHECK(worst <= 1e-3);
    CHECK(worst == run.record.max_abs_error);
}

TEST_CASE("transform codec: non-multiple-of-4 dimensions round-trip within bound") {
    const Field2D field = testsupport::single_range_grf(67, 45, 5.0, 14);
    const CodecRun run = run_codec(builtin_codec("zfp-like"), field, 1e-4);
    CHECK(run.record.max_abs_error <= 1e-4);
}

TEST_CASE("multilevel codec: level count and constant-field behavior") {
    CHECK(multilevel_levels(256, 256) == 8);
    CHECK(multilevel_levels(1028, 1028) == 10);
    CHECK(multilevel_levels(300, 2048) == 8);
    const CodecRun run = run_codec(builtin_codec("mgard-like"), testsupport::constant_field(256, 256, 2.0), 1e-3);
    CHECK(run.record.compression_ratio > 1000.0);
    CHECK(run.record.max_abs_error <= 1e-3);
}

TEST_CASE("multilevel codec: bound enforced by construction on rough data") {
    const Field2D noise = testsupport::white_noise_field(96, 96, 15);
    for (double eb : {1e-5, 1e-2}) {
        const CodecRun run = run_codec(builtin_codec("mgard-like"), noise, eb);
        CHECK(run.record.max_abs_error <= eb);
    }
}

TEST_CASE("multilevel codec: decoder applies sparse residual patches") {
    const Field2D field = testsupport::single_range_grf(32, 32, 4.0, 40);
    const Codec& codec = builtin_codec("mgard-like");
    const CompressedBlob blob = compress_with(codec, field, 1e-3);
    const Field2D plain = decompress_with(codec, blob);

    // Payload layout after the byte stage: flags u8, halvings u8,
    // varint patch count, patches (u32le pos + f64le residual), entropy data.
    std::vector<unsigned char> raw = byte_stage_unpack(blob.payload.data(), blob.payload.size());
    REQUIRE(raw.size() > 3);
    REQUIRE(raw[2] == 0);  // no patches emitted for this field
    std::vector<unsigned char> doctored(raw.begin(), raw.begin() + 2);
    doctored.push_back(1);  // one patch
    const std::uint32_t pos = 5 * 32 + 7;
    const double residual = 0.125;
    for (int i = 0; i < 4; ++i) doctored.push_back(static_cast<unsigned char>(pos >> (8 * i)));
    unsigned char rb[8];
    std::memcpy(rb, &residual, 8);
    doctored.insert(doctored.end(), rb, rb + 8);
    doctored.insert(doctored.end(), raw.begin() + 3, raw.end());

    CompressedBlob patched = blob;
    patched.payload = byte_stage_pack(doctored);
    const Field2D out = decompress_with(codec, patched);
    for (size_t i = 0; i < out.values.size(); ++i) {
        if (i == pos) {
            CHECK(out.values[i] == plain.values[i] + residual);
        } else {
            CHECK(out.values[i] == plain.values[i]);
        }
    }
}

TEST_CASE("multilevel codec: odd dimensions pad and round-trip within bound") {
    const Field2D field = testsupport::single_range_grf(130, 70, 6.0, 16);
    const CodecRun run = run_codec(builtin_codec("mgard-like"), field, 1e-3);
    CHECK(run.record.max_abs_error <= 1e-3);
}

TEST_CASE("minimal and awkward field shapes round-trip within bound") {
    std::vector<Field2D> fields;
    Field2D tiny;
    tiny.nx = 2;
    tiny.ny = 2;
    tiny.values = {1.0, -2.0, 3.0, 0.5};
    tiny.field_id = "tiny2x2";
    fields.push_back(tiny);
    fields.push_back(testsupport::white_noise_field(3, 5, 30));
    fields.push_back(testsupport::white_noise_field(17, 2, 31));
    fields.push_back(testsupport::white_noise_field(33, 16, 32));
    for (const auto& id : builtin_codec_ids()) {
        const Codec& codec = builtin_codec(id);
        for (const auto& field : fields) {
            const CodecRun run = run_codec(codec, field, 1e-4);
            INFO(id, " on ", field.field_id, " (", field.nx, "x", field.ny, ")");
            CHECK(run.record.max_abs_error <= 1e-4);
        }
    }
}

TEST_CASE("codecs reject invalid requests with typed errors") {
    const Field2D field = testsupport::constant_field(8, 8, 0.0);
    CHECK_THROWS_AS(compress_with(builtin_codec("sz-like"), field, 0.0), validation_error);
    CHECK_THROWS_AS(compress_with(builtin_codec("sz-like"), field, -1e-3), validation_error);
    CHECK_THROWS_AS(builtin_codec("lzma"), parameter_error);

    Field2D bad = field;
    bad.values[3] = std::nan("");
    CHECK_THROWS_AS(compress_with(builtin_codec("sz-like"), bad, 1e-3), validation_error);
}

TEST_CASE("corrupt payloads raise integrity errors") {
    const Field2D field = testsupport::single_range_grf(32, 32, 4.0, 17);
    for (const auto& id : builtin_codec_ids()) {
        const Codec& codec = builtin_codec(id);
        CompressedBlob blob = compress_with(codec, field, 1e-3);
        blob.payload.resize(blob.payload.size() / 3);
        CHECK_THROWS_AS(decompress_with(codec, blob), integrity_error);
    }
}

TEST_CASE("decoders survive corrupt input: typed error or well-formed output, never a crash") {
    std::mt19937_64 rng(2027);
    const Field2D field = testsupport::single_range_grf(32, 32, 4.0, 23);
    for (const auto& id : builtin_codec_ids()) {
        const Codec& codec = builtin_codec(id);
        const CompressedBlob good = compress_with(codec, field, 1e-3);
        for (int trial = 0; trial < 60; ++trial) {
            CompressedBlob blob = good;
            if (trial % 3 == 0) {
                // pure random bytes
                blob.payload.resize(1 + rng() % 400);
                for (auto& b : blob.payload) b = static_cast<unsigned char>(rng());
            } else if (trial % 3 == 1) {
                // random truncation
                blob.payload.resize(rng() % (good.payload.size() + 1));
            } else {
                // bit flips in a valid payload
                for (int flips = 0; flips < 8 && !blob.payload.empty(); ++flips) {
                    blob.payload[rng() % blob.payload.size()] ^=
                        static_cast<unsigned char>(1u << (rng() % 8));
                }
            }
            try {
                const Field2D out = decompress_with(codec, blob);
                CHECK(out.nx == field.nx);
                CHECK(out.ny == field.ny);
                CHECK(out.values.size() == field.values.size());
            } catch (const error&) {
                // typed rejection is the expected path
            }
        }
    }
}

TEST_CASE("compression metrics match a brute-force scan") {
    const Field2D a = testsupport::single_range_grf(48, 48, 4.0, 18);
    Field2D b = a;
    std::mt19937_64 rng(19);
    for (double& v : b.values) v += (static_cast<double>(rng() >> 11) * 0x1p-53 - 0.5) * 2e-3;
    CompressedBlob blob;
    blob.codec_id = "sz-like";
    blob.nx = a.nx;
    blob.ny = a.ny;
    blob.eb = 1e-3;
    blob.payload.assign(100, 0);

    const CompressionRecord rec = compression_metrics(a, b, blob, 0.5, 0.25);
    double expected_max = 0.0;
    for (size_t i = 0; i < a.values.size(); ++i) {
        expected_max = std::max(expected_max, std::abs(a.values[i] - b.values[i]));
    }
    CHECK(rec.max_abs_error == expected_max);
    CHECK(rec.original_bytes == 48 * 48 * 8);
    CHECK(rec.compressed_bytes == static_cast<long long>(blob.total_bytes()));
    CHECK(rec.compression_ratio ==
          doctest::Approx(static_cast<double>(rec.original_bytes) / rec.compressed_bytes));
    CHECK(rec.encode_seconds == 0.5);

    const CompressionRecord same = compression_metrics(a, a, blob);
    CHECK(same.max_abs_error == 0.0);

    Field2D wrong;
    wrong.nx = 24;
    wrong.ny = 48;
    wrong.values.assign(24 * 48, 0.0);
    CHECK_THROWS_AS(compression_metrics(a, wrong, blob), input_error);
}

TEST_CASE("compression ratio follows its definition") {
    Field2D f = testsupport::constant_field(25, 5, 1.0);  // 1000 bytes
    Field2D g = f;
    CompressedBlob blob;
    blob.codec_id = "x";
    blob.nx = 25;
    blob.ny = 5;
    blob.eb = 1.0;
    blob.payload.assign(100 - (4 + 1 + 2 + 1 + 4 + 4 + 8), 0);  // 100-byte blob total
    const CompressionRecord rec = compression_metrics(f, g, blob);
    CHECK(rec.compressed_bytes == 100);
    CHECK(rec.compression_ratio == 10.0);
}

TEST_CASE("CR is non-decreasing in the error bound and in the range") {
    const Field2D field = testsupport::single_range_grf(128, 128, 8.0, 20);
    const Field2D rough_field = testsupport::single_range_grf(128, 128, 2.0, 20);
    const Field2D smooth_field = testsupport::single_range_grf(128, 128, 32.0, 20);
    for (const auto& id : builtin_codec_ids()) {
        const Codec& codec = builtin_codec(id);
        double prev = 0.0;
        for (double eb : {1e-5, 1e-4, 1e-3, 1e-2}) {
            const CodecRun run = run_codec(codec, field, eb);
            INFO(id, " eb ", eb);
            CHECK(run.record.compression_ratio >= prev);
            prev = run.record.compression_ratio;
        }
        const CodecRun rough = run_codec(codec, rough_field, 1e-3);
        const CodecRun smooth = run_codec(codec, smooth_field, 1e-3);
        INFO(id);
        CHECK(smooth.record.compression_ratio > rough.record.compression_ratio);
    }
}

TEST_CASE("external codec: a copy utility is the identity codec") {
    const Field2D field = testsupport::single_range_grf(32, 32, 4.0, 21);
    const ExternalCodec codec("copy", "cp {input} {output}", "cp {input} {output}");
    const CodecRun run = run_codec_checked(codec, field, 1e-3);
    CHECK(run.record.max_abs_error == 0.0);
    CHECK(run.record.codec_id == "external:copy");
    // payload is the raw field, so the ratio is the container overhead only
    CHECK(run.record.compression_ratio > 0.99);
    CHECK(run.record.compression_ratio <= 1.0);
}

TEST_CASE("external codec: bound violations and process failures surface as errors") {
    const Field2D field = testsupport::single_range_grf(32, 32, 4.0, 22);
    SUBCASE("corrupting codec violates the bound") {
        // decompress emits zeros of the right size -> bound violated
        const ExternalCodec codec("zeros", "cp {input} {output}",
                                  "test -f {input} && head -c 8192 /dev/zero > {output}");
        CHECK_THROWS_AS(run_codec_checked(codec, field, 1e-3), external_codec_error);
    }
    SUBCASE("nonzero exit status") {
        const ExternalCodec codec("fail", "false {input} {output}", "cp {input} {output}");
        CHECK_THROWS_AS(run_codec_checked(codec, field, 1e-3), external_codec_error);
    }
    SUBCASE("missing output file") {
        const ExternalCodec codec("noout", "true {input} {output}", "cp {input} {output}");
        CHECK_THROWS_AS(run_codec_checked(codec, field, 1e-3), external_codec_error);
    }
    SUBCASE("wrong output size") {
        const ExternalCodec codec("short", "cp {input} {output}",
                                  "head -c 100 {input} > {output}");
        CHECK_THROWS_AS(run_codec_checked(codec, field, 1e-3), external_codec_error);
    }
    SUBCASE("template without placeholders") {
        const ExternalCodec codec("bad", "true", "true");
        CHECK_THROWS_AS(run_codec_checked(codec, field, 1e-3), parameter_error);
    }
}

}  // TEST_SUITE
