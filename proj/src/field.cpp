#include "csc/field.hpp"

#include <cmath>

#include "csc/errors.hpp"

namespace csc {

void validate_field(const Field2D& field) {
    if (field.nx < 2 || field.ny < 2) {
        throw validation_error("field '" + field.field_id + "': nx and ny must both be >= 2, got " +
                               std::to_string(field.nx) + "x" + std::to_string(field.ny));
    }
    const size_t expected = static_cast<size_t>(field.nx) * field.ny;
    if (field.values.size() != expected) {
        throw validation_error("field '" + field.field_id + "': values holds " +
                               std::to_string(field.values.size()) + " entries, expected nx*ny = " +
                               std::to_string(expected));
    }
    for (double v : field.values) {
        if (!std::isfinite(v)) {
            throw validation_error("field '" + field.field_id + "': values must all be finite");
        }
    }
}

Field2D extract_window(const Field2D& field, int x0, int y0, int w, int h) {
    if (x0 < 0 || y0 < 0 || w < 1 || h < 1 || x0 + w > field.nx || y0 + h > field.ny) {
        throw index_error("window [" + std::to_string(x0) + "," + std::to_string(y0) + "]+" +
                          std::to_string(w) + "x" + std::to_string(h) + " exceeds field " +
                          std::to_string(field.nx) + "x" + std::to_string(field.ny));
    }
    Field2D win;
    win.nx = w;
    win.ny = h;
    win.values.resize(static_cast<size_t>(w) * h);
    win.field_id = field.field_id + "_win";
    win.provenance = field.provenance;
    for (int iy = 0; iy < h; ++iy) {
        const double* src = &field.values[static_cast<size_t>(y0 + iy) * field.nx + x0];
        std::copy(src, src + w, &win.values[static_cast<size_t>(iy) * w]);
    }
    return win;
}

}  // namespace csc
