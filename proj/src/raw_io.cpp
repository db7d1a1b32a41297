#include "csc/raw_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>

#include <json.hpp>

#include "csc/errors.hpp"

namespace csc {

namespace {

constexpr bool kHostLittle = std::endian::native == std::endian::little;

template <typename T>
T byteswap_value(T v) {
    unsigned char* p = reinterpret_cast<unsigned char*>(&v);
    for (size_t i = 0; i < sizeof(T) / 2; ++i) std::swap(p[i], p[sizeof(T) - 1 - i]);
    return v;
}

template <typename T>
double decode_at(const unsigned char* bytes, size_t index, bool swap) {
    T v;
    std::memcpy(&v, bytes + index * sizeof(T), sizeof(T));
    if (swap) v = byteswap_value(v);
    return static_cast<double>(v);
}

size_t dtype_width(RawDtype dtype) {
    return dtype == RawDtype::float32 ? 4 : 8;
}

}  // namespace

RawDtype parse_dtype(const std::string& name) {
    if (name == "float32") return RawDtype::float32;
    if (name == "float64") return RawDtype::float64;
    throw parameter_error("unknown dtype '" + name + "' (expected float32 or float64)");
}

ByteOrder parse_byte_order(const std::string& name) {
    if (name == "little") return ByteOrder::little;
    if (name == "big") return ByteOrder::big;
    throw parameter_error("unknown byte order '" + name + "' (expected little or big)");
}

std::string dtype_name(RawDtype dtype) {
    return dtype == RawDtype::float32 ? "float32" : "float64";
}

std::string byte_order_name(ByteOrder order) {
    return order == ByteOrder::little ? "little" : "big";
}

Field2D load_raw_field(const std::string& path, const std::vector<long long>& dims, RawDtype dtype,
                       ByteOrder order, int slice_axis, long long slice_index) {
    if (dims.size() != 2 && dims.size() != 3) {
        throw parameter_error("dims must have 2 or 3 entries, got " + std::to_string(dims.size()));
    }
    long long count = 1;
    for (long long d : dims) {
        if (d < 1) throw parameter_error("every dimension must be >= 1");
        count *= d;
    }
    const size_t width = dtype_width(dtype);

    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open '" + path + "'");
    in.seekg(0, std::ios::end);
    const long long actual_bytes = static_cast<long long>(in.tellg());
    const long long expected_bytes = count * static_cast<long long>(width);
    if (actual_bytes != expected_bytes) {
        throw format_error("'" + path + "': file holds " + std::to_string(actual_bytes) +
                           " bytes, layout requires " + std::to_string(expected_bytes));
    }

    const bool swap = (order == ByteOrder::little) != kHostLittle;
    std::vector<unsigned char> buffer;
    // Reads `n` contiguous elements starting at flat element index `start`
    // into field.values at `dest`. Only the touched bytes are read, so
    // slicing a large volume does not load it whole.
    auto read_run = [&](Field2D& field, size_t dest, long long start, long long n) {
        buffer.resize(static_cast<size_t>(n) * width);
        in.seekg(start * static_cast<long long>(width), std::ios::beg);
        in.read(reinterpret_cast<char*>(buffer.data()), static_cast<std::streamsize>(buffer.size()));
        if (!in) throw input_error("short read on '" + path + "'");
        for (long long i = 0; i < n; ++i) {
            field.values[dest + static_cast<size_t>(i)] =
                dtype == RawDtype::float32
                    ? decode_at<float>(buffer.data(), static_cast<size_t>(i), swap)
                    : decode_at<double>(buffer.data(), static_cast<size_t>(i), swap);
        }
    };

    Field2D field;
    field.field_id = std::filesystem::path(path).stem().string();
    if (dims.size() == 2) {
        field.ny = static_cast<int>(dims[0]);
        field.nx = static_cast<int>(dims[1]);
        field.values.resize(static_cast<size_t>(count));
        read_run(field, 0, 0, count);
        field.provenance = "raw(path=" + path + ",dims=" + std::to_string(dims[0]) + "x" +
                           std::to_string(dims[1]) + ",dtype=" + dtype_name(dtype) + ")";
        return field;
    }

    if (slice_axis < 0 || slice_axis > 2) {
        throw parameter_error("slice_axis must be 0, 1 or 2 for 3D input");
    }
    if (slice_index < 0 || slice_index >= dims[slice_axis]) {
        throw index_error("slice_index " + std::to_string(slice_index) + " out of range for axis " +
                          std::to_string(slice_axis) + " of extent " +
                          std::to_string(dims[slice_axis]));
    }
    const long long d0 = dims[0], d1 = dims[1], d2 = dims[2];
    const long long s = slice_index;
    // The two remaining axes keep their C order: the earlier one becomes rows.
    if (slice_axis == 0) {
        field.ny = static_cast<int>(d1);
        field.nx = static_cast<int>(d2);
        field.values.resize(static_cast<size_t>(field.nx) * field.ny);
        read_run(field, 0, s * d1 * d2, d1 * d2);
    } else if (slice_axis == 1) {
        field.ny = static_cast<int>(d0);
        field.nx = static_cast<int>(d2);
        field.values.resize(static_cast<size_t>(field.nx) * field.ny);
        for (long long iy = 0; iy < d0; ++iy) {
            read_run(field, static_cast<size_t>(iy) * field.nx, iy * d1 * d2 + s * d2, d2);
        }
    } else {
        field.ny = static_cast<int>(d0);
        field.nx = static_cast<int>(d1);
        field.values.resize(static_cast<size_t>(field.nx) * field.ny);
        for (long long iy = 0; iy < d0; ++iy) {
            for (long long ix = 0; ix < d1; ++ix) {
                read_run(field, static_cast<size_t>(iy) * field.nx + static_cast<size_t>(ix),
                         iy * d1 * d2 + ix * d2 + s, 1);
            }
        }
    }
    field.field_id += "_ax" + std::to_string(slice_axis) + "_i" + std::to_string(slice_index);
    field.provenance = "raw(path=" + path + ",dims=" + std::to_string(d0) + "x" + std::to_string(d1) +
                       "x" + std::to_string(d2) + ",dtype=" + dtype_name(dtype) + ",axis=" +
                       std::to_string(slice_axis) + ",index=" + std::to_string(slice_index) + ")";
    return field;
}

void save_raw_field(const Field2D& field, const std::string& path, RawDtype dtype, ByteOrder order) {
    validate_field(field);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw input_error("cannot create '" + path + "'");
    const bool swap = (order == ByteOrder::little) != kHostLittle;
    if (dtype == RawDtype::float64) {
        for (double v : field.values) {
            double w = swap ? byteswap_value(v) : v;
            out.write(reinterpret_cast<const char*>(&w), sizeof(w));
        }
    } else {
        for (double v : field.values) {
            float f = static_cast<float>(v);
            if (swap) f = byteswap_value(f);
            out.write(reinterpret_cast<const char*>(&f), sizeof(f));
        }
    }
    if (!out) throw input_error("short write on '" + path + "'");
}

void save_field_sidecar(const Field2D& field, const std::string& raw_path,
                        const std::string& generator_json) {
    nlohmann::json doc{{"field_id", field.field_id},
                       {"nx", field.nx},
                       {"ny", field.ny},
                       {"provenance", field.provenance}};
    if (!generator_json.empty()) {
        try {
            doc["generator"] = nlohmann::json::parse(generator_json);
        } catch (const nlohmann::json::exception&) {
            doc["generator"] = generator_json;
        }
    }
    std::ofstream out(raw_path + ".json", std::ios::trunc);
    if (!out) throw input_error("cannot create '" + raw_path + ".json'");
    out << doc.dump(2) << "\n";
}

Field2D load_field_with_sidecar(const std::string& raw_path) {
    std::ifstream meta(raw_path + ".json");
    if (!meta) {
        throw input_error("no sidecar '" + raw_path + ".json'; pass explicit dimensions instead");
    }
    nlohmann::json doc;
    try {
        meta >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw schema_error("sidecar '" + raw_path + ".json' is not valid JSON: " + e.what());
    }
    if (!doc.contains("nx") || !doc.contains("ny")) {
        throw schema_error("sidecar '" + raw_path + ".json' lacks nx/ny");
    }
    Field2D field = load_raw_field(raw_path, {doc["ny"].get<long long>(), doc["nx"].get<long long>()});
    field.field_id = doc.value("field_id", field.field_id);
    field.provenance = doc.value("provenance", field.provenance);
    return field;
}

}  // namespace csc
