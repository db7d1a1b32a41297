#ifndef CSC_RAW_IO_HPP
#define CSC_RAW_IO_HPP

#include <string>
#include <vector>

#include "csc/field.hpp"

namespace csc {

enum class RawDtype { float32, float64 };
enum class ByteOrder { little, big };

RawDtype parse_dtype(const std::string& name);
ByteOrder parse_byte_order(const std::string& name);
std::string dtype_name(RawDtype dtype);
std::string byte_order_name(ByteOrder order);

// Loads a headerless IEEE-754 array, row-major (C order). `dims` has 2 or 3
// entries; 3D input is sliced along slice_axis at slice_index, 2D input is
// returned whole and the slice arguments are ignored. float32 values are
// widened to the working double precision.
Field2D load_raw_field(const std::string& path, const std::vector<long long>& dims,
                       RawDtype dtype = RawDtype::float64, ByteOrder order = ByteOrder::little,
                       int slice_axis = 0, long long slice_index = 0);

// Writes the field as a headerless array in the given dtype/byte order.
void save_raw_field(const Field2D& field, const std::string& path,
                    RawDtype dtype = RawDtype::float64, ByteOrder order = ByteOrder::little);

// Sidecar metadata (JSON text at raw_path + ".json"): field_id, nx, ny,
// provenance, plus the generator spec when the field is synthetic
// (generator_json as serialized by the caller).
void save_field_sidecar(const Field2D& field, const std::string& raw_path,
                        const std::string& generator_json = {});

// Loads a field whose dims come from the sidecar written by save_field_sidecar
// (looked up at raw_path + ".json").
Field2D load_field_with_sidecar(const std::string& raw_path);

}  // namespace csc

#endif
