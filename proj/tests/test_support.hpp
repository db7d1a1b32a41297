#ifndef CSC_TESTS_TEST_SUPPORT_HPP
#define CSC_TESTS_TEST_SUPPORT_HPP

#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "csc/field.hpp"
#include "csc/grf.hpp"

namespace csc::testsupport {

// iid standard normal field (no spatial correlation).
inline Field2D white_noise_field(int nx, int ny, std::uint64_t seed, double sigma = 1.0) {
    Field2D field;
    field.nx = nx;
    field.ny = ny;
    field.values.resize(static_cast<size_t>(nx) * ny);
    field.field_id = "noise_s" + std::to_string(seed);
    field.provenance = "iid normal, sigma=" + std::to_string(sigma);
    NormalStream normals(mix_seed(seed, 0xabcdef));
    for (double& v : field.values) v = sigma * normals.next();
    return field;
}

inline Field2D constant_field(int nx, int ny, double value) {
    Field2D field;
    field.nx = nx;
    field.ny = ny;
    field.values.assign(static_cast<size_t>(nx) * ny, value);
    field.field_id = "const";
    field.provenance = "constant " + std::to_string(value);
    return field;
}

inline Field2D single_range_grf(int nx, int ny, double range, std::uint64_t seed) {
    GrfSpec spec;
    spec.nx = nx;
    spec.ny = ny;
    spec.components = {{range, 1.0}};
    spec.seed = seed;
    return generate_grf(spec);
}

// Left half from a GRF with range_left, right half from one with range_right,
// both drawn with the same seed protocol. The spatial two-range fixture.
inline Field2D half_and_half_field(int nx, int ny, double range_left, double range_right,
                                   std::uint64_t seed) {
    const Field2D left = single_range_grf(nx, ny, range_left, seed);
    const Field2D right = single_range_grf(nx, ny, range_right, seed + 1000);
    Field2D field = left;
    field.field_id = "half_a" + std::to_string(range_left) + "_a" + std::to_string(range_right) +
                     "_s" + std::to_string(seed);
    field.provenance = "left: " + left.provenance + "; right: " + right.provenance;
    for (int iy = 0; iy < ny; ++iy) {
        for (int ix = nx / 2; ix < nx; ++ix) field.at(ix, iy) = right.at(ix, iy);
    }
    return field;
}

inline double spearman_rank_correlation(std::vector<double> x, std::vector<double> y) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<size_t> order(v.size());
        std::iota(order.begin(), order.end(), size_t{0});
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return v[a] < v[b]; });
        std::vector<double> r(v.size());
        size_t i = 0;
        while (i < order.size()) {
            size_t j = i;
            while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
            const double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
            for (size_t k = i; k <= j; ++k) r[order[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const std::vector<double> rx = ranks(x), ry = ranks(y);
    const double n = static_cast<double>(rx.size());
    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < rx.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    return sxy / std::sqrt(sxx * syy);
}

inline double field_mean(const Field2D& f) {
    double s = 0.0;
    for (double v : f.values) s += v;
    return s / static_cast<double>(f.values.size());
}

}  // namespace csc::testsupport

#endif
