#ifndef CSC_FIELD_HPP
#define CSC_FIELD_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace csc {

// A 2D grid of real values, row-major: values[iy * nx + ix].
// nx counts columns, ny counts rows. The universal payload of the toolkit.
struct Field2D {
    int nx = 0;
    int ny = 0;
    std::vector<double> values;
    std::string field_id;
    std::string provenance;

    double& at(int ix, int iy) { return values[static_cast<size_t>(iy) * nx + ix]; }
    double at(int ix, int iy) const { return values[static_cast<size_t>(iy) * nx + ix]; }
    size_t size() const { return values.size(); }
};

// Throws validation_error naming the violated invariant:
// nx,ny >= 2, values.size() == nx*ny, all values finite.
void validate_field(const Field2D& field);

// Extracts the H x W window whose top-left corner is (x0, y0).
Field2D extract_window(const Field2D& field, int x0, int y0, int w, int h);

}  // namespace csc

#endif
