#include "csc/svd_stats.hpp"

#include <algorithm>
#include <cmath>

#include "csc/errors.hpp"

namespace csc {

std::vector<double> singular_values(const Field2D& window) {
    // Work on columns of an m x n matrix with m >= n; transposing does not
    // change the singular values.
    const bool transpose = window.ny < window.nx;
    const int m = transpose ? window.nx : window.ny;
    const int n = transpose ? window.ny : window.nx;
    std::vector<double> a(static_cast<size_t>(m) * n);  // column-major
    for (int iy = 0; iy < window.ny; ++iy) {
        for (int ix = 0; ix < window.nx; ++ix) {
            const double v = window.at(ix, iy);
            if (transpose) {
                a[static_cast<size_t>(iy) * m + ix] = v;
            } else {
                a[static_cast<size_t>(ix) * m + iy] = v;
            }
        }
    }

    auto col = [&](int j) { return a.data() + static_cast<size_t>(j) * m; };
    const double eps = 1e-15;
    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
        bool rotated = false;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double app = 0.0, aqq = 0.0, apq = 0.0;
                const double* cp = col(p);
                const double* cq = col(q);
                for (int i = 0; i < m; ++i) {
                    app += cp[i] * cp[i];
                    aqq += cq[i] * cq[i];
                    apq += cp[i] * cq[i];
                }
                if (std::abs(apq) <= eps * std::sqrt(app * aqq) || apq == 0.0) continue;
                rotated = true;
                const double tau = (aqq - app) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                double* wp = col(p);
                double* wq = col(q);
                for (int i = 0; i < m; ++i) {
                    const double vp = wp[i];
                    const double vq = wq[i];
                    wp[i] = c * vp - s * vq;
                    wq[i] = s * vp + c * vq;
                }
            }
        }
        if (!rotated) break;
    }

    std::vector<double> sigma(n);
    for (int j = 0; j < n; ++j) {
        double ss = 0.0;
        const double* cj = col(j);
        for (int i = 0; i < m; ++i) ss += cj[i] * cj[i];
        sigma[j] = std::sqrt(ss);
    }
    std::sort(sigma.begin(), sigma.end(), std::greater<double>());
    return sigma;
}

TruncationLevel svd_truncation_level(const Field2D& window, double threshold, bool center) {
    validate_field(window);
    if (!(threshold > 0.0) || threshold > 1.0) {
        throw parameter_error("threshold must lie in (0, 1], got " + std::to_string(threshold));
    }

    Field2D centered = window;
    if (center) {
        double mean = 0.0;
        for (double v : centered.values) mean += v;
        mean /= static_cast<double>(centered.values.size());
        for (double& v : centered.values) v -= mean;
    }

    const std::vector<double> sigma = singular_values(centered);
    double energy = 0.0;
    for (double s : sigma) energy += s * s;
    if (energy <= 0.0) {
        return TruncationLevel{1, 1.0};
    }
    double cumulative = 0.0;
    for (size_t i = 0; i < sigma.size(); ++i) {
        cumulative += sigma[i] * sigma[i];
        if (cumulative / energy >= threshold) {
            return TruncationLevel{static_cast<int>(i) + 1, cumulative / energy};
        }
    }
    return TruncationLevel{static_cast<int>(sigma.size()), 1.0};
}

LocalStats local_svd_stats(const Field2D& field, int window_size, double threshold, bool center) {
    validate_field(field);
    if (window_size < 8) throw parameter_error("window size H must be >= 8");
    const int wx = field.nx / window_size;
    const int wy = field.ny / window_size;
    if (wx < 2 || wy < 2) {
        throw input_error("field " + std::to_string(field.nx) + "x" + std::to_string(field.ny) +
                          " yields fewer than 2x2 complete windows of size " +
                          std::to_string(window_size));
    }
    LocalStats stats;
    stats.window_size = window_size;
    stats.statistic_name = "svd_truncation_std";
    stats.windows_x = wx;
    stats.windows_y = wy;
    stats.window_grid.reserve(static_cast<size_t>(wx) * wy);
    for (int tile_y = 0; tile_y < wy; ++tile_y) {
        for (int tile_x = 0; tile_x < wx; ++tile_x) {
            const Field2D win =
                extract_window(field, tile_x * window_size, tile_y * window_size, window_size,
                               window_size);
            stats.window_grid.push_back(
                static_cast<double>(svd_truncation_level(win, threshold, center).k));
        }
    }
    finalize_local_stats(stats);
    return stats;
}

}  // namespace csc
