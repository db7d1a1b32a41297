#include "csc/variogram.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "csc/errors.hpp"

namespace csc {

std::string model_form_name(VariogramModel m) {
    return m == VariogramModel::a_squared ? "a_squared" : "a_linear";
}

VariogramModel parse_model_form(const std::string& name) {
    if (name == "a_squared") return VariogramModel::a_squared;
    if (name == "a_linear") return VariogramModel::a_linear;
    throw parameter_error("unknown model form '" + name + "' (expected a_squared or a_linear)");
}

VariogramEstimate empirical_variogram(const Field2D& field, double max_lag, int stride) {
    validate_field(field);
    const int nx = field.nx, ny = field.ny;
    const double limit = std::min(nx, ny) / 2.0;
    if (!(max_lag >= 1.0) || max_lag > limit) {
        throw parameter_error("max_lag must lie in [1, min(nx,ny)/2] = [1, " + std::to_string(limit) +
                              "], got " + std::to_string(max_lag));
    }
    if (stride < 1) throw parameter_error("stride must be >= 1");

    // Offsets over the closed half plane (dx > 0, or dx == 0 and dy > 0) so
    // each unordered pair is visited exactly once at stride 1.
    const int r = static_cast<int>(std::floor(max_lag));
    const double max_lag2 = max_lag * max_lag;
    const int max_bin = static_cast<int>(std::llround(max_lag));
    std::vector<double> sums(max_bin + 1, 0.0);
    std::vector<long long> counts(max_bin + 1, 0);

    // Anchors sit on the absolute grid every `stride` pixels in each
    // dimension; the partner anchor+offset must stay in range.
    const double* z = field.values.data();
    for (int dx = 0; dx <= r; ++dx) {
        const int dy_start = (dx == 0) ? 1 : -r;
        for (int dy = dy_start; dy <= r; ++dy) {
            const double d2 = static_cast<double>(dx) * dx + static_cast<double>(dy) * dy;
            if (d2 > max_lag2) continue;
            const int bin = static_cast<int>(std::llround(std::sqrt(d2)));
            if (bin < 1 || bin > max_bin) continue;
            double sum = 0.0;
            long long n = 0;
            for (int iy = 0; iy < ny; iy += stride) {
                const int py = iy + dy;
                if (py < 0 || py >= ny) continue;
                const double* row = z + static_cast<size_t>(iy) * nx;
                const double* other = z + static_cast<size_t>(py) * nx + dx;
                const int x_hi = nx - dx;
                for (int ix = 0; ix < x_hi; ix += stride) {
                    const double diff = row[ix] - other[ix];
                    sum += diff * diff;
                    ++n;
                }
            }
            sums[bin] += sum;
            counts[bin] += n;
        }
    }

    VariogramEstimate estimate;
    estimate.max_lag = max_lag;
    estimate.subsample_stride = stride;
    for (int b = 1; b <= max_bin; ++b) {
        if (counts[b] >= 1) {
            estimate.bins.push_back({static_cast<double>(b), sums[b] / (2.0 * counts[b]), counts[b]});
        }
    }
    return estimate;
}

int auto_stride(int nx, int ny, double max_lag) {
    const double offsets = std::numbers::pi_v<double> / 2.0 * max_lag * max_lag;
    int stride = 1;
    while (true) {
        const double anchors = std::ceil(static_cast<double>(nx) / stride) *
                               std::ceil(static_cast<double>(ny) / stride);
        if (offsets * anchors <= 1e8 || stride >= std::max(nx, ny)) return stride;
        ++stride;
    }
}

namespace {

// Closed-form weighted sill for a fixed decay parameter, and the resulting
// weighted residual sum of squares.
double weighted_rss_for(const VariogramEstimate& v, double decay, double* sill_out) {
    double num = 0.0, den = 0.0;
    for (const auto& b : v.bins) {
        const double phi = 1.0 - std::exp(-(b.lag * b.lag) / decay);
        num += b.pair_count * b.gamma * phi;
        den += b.pair_count * phi * phi;
    }
    const double sill = den > 0.0 ? std::max(num / den, 0.0) : 0.0;
    double rss = 0.0;
    for (const auto& b : v.bins) {
        const double phi = 1.0 - std::exp(-(b.lag * b.lag) / decay);
        const double res = b.gamma - sill * phi;
        rss += b.pair_count * res * res;
    }
    if (sill_out) *sill_out = sill;
    return rss;
}

double decay_of(double a, VariogramModel form) {
    return form == VariogramModel::a_squared ? a * a : a;
}

}  // namespace

FittedVariogram fit_range(const VariogramEstimate& v, VariogramModel model_form) {
    if (v.bins.size() < 3) {
        throw insufficient_data_error("variogram fit needs >= 3 bins, got " +
                                      std::to_string(v.bins.size()));
    }
    bool any_nonzero = false;
    for (const auto& b : v.bins) any_nonzero = any_nonzero || b.gamma > 0.0;
    if (!any_nonzero) {
        throw degenerate_field_error("variogram is identically zero (constant field)");
    }

    const double a_lo = 0.5;
    const double a_hi = 4.0 * v.max_lag;
    auto rss_at = [&](double a) { return weighted_rss_for(v, decay_of(a, model_form), nullptr); };

    // Coarse geometric scan to bracket the minimum, then golden section.
    const int kScan = 64;
    double best_a = a_lo, best_rss = rss_at(a_lo);
    const double step = std::pow(a_hi / a_lo, 1.0 / (kScan - 1));
    double lo = a_lo, hi = a_hi;
    for (int i = 1; i < kScan; ++i) {
        const double a = a_lo * std::pow(step, i);
        const double rss = rss_at(a);
        if (rss < best_rss) {
            best_rss = rss;
            best_a = a;
        }
    }
    lo = std::max(a_lo, best_a / step);
    hi = std::min(a_hi, best_a * step);

    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = hi - invphi * (hi - lo);
    double x2 = lo + invphi * (hi - lo);
    double f1 = rss_at(x1), f2 = rss_at(x2);
    while (hi - lo > 1e-6 * std::max(1.0, std::abs(lo))) {
        if (f1 <= f2) {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - invphi * (hi - lo);
            f1 = rss_at(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + invphi * (hi - lo);
            f2 = rss_at(x2);
        }
    }
    FittedVariogram fit;
    fit.model_form = model_form;
    fit.range = (lo + hi) / 2.0;
    fit.weighted_rss = weighted_rss_for(v, decay_of(fit.range, model_form), &fit.sill);
    return fit;
}

FittedVariogram global_range(const Field2D& field) {
    validate_field(field);
    const double max_lag = std::max(1.0, std::floor(std::min(field.nx, field.ny) / 4.0));
    const int stride = auto_stride(field.nx, field.ny, max_lag);
    return fit_range(empirical_variogram(field, max_lag, stride));
}

void finalize_local_stats(LocalStats& stats) {
    double sum = 0.0;
    for (double v : stats.window_grid) sum += v;
    const double n = static_cast<double>(stats.window_grid.size());
    stats.mean = sum / n;
    double ss = 0.0;
    for (double v : stats.window_grid) ss += (v - stats.mean) * (v - stats.mean);
    stats.std = std::sqrt(ss / n);
}

LocalStats local_variogram_stats(const Field2D& field, int window_size) {
    validate_field(field);
    if (window_size < 8) throw parameter_error("window size H must be >= 8");
    const int wx = field.nx / window_size;
    const int wy = field.ny / window_size;
    if (wx < 2 || wy < 2) {
        throw input_error("field " + std::to_string(field.nx) + "x" + std::to_string(field.ny) +
                          " yields fewer than 2x2 complete windows of size " +
                          std::to_string(window_size));
    }
    const double max_lag = window_size / 2.0;

    LocalStats stats;
    stats.window_size = window_size;
    stats.statistic_name = "local_vario_range";
    stats.windows_x = wx;
    stats.windows_y = wy;
    stats.window_grid.reserve(static_cast<size_t>(wx) * wy);
    for (int tile_y = 0; tile_y < wy; ++tile_y) {
        for (int tile_x = 0; tile_x < wx; ++tile_x) {
            const Field2D win =
                extract_window(field, tile_x * window_size, tile_y * window_size, window_size,
                               window_size);
            double value;
            try {
                value = fit_range(empirical_variogram(win, max_lag, 1)).range;
            } catch (const degenerate_field_error&) {
                // Constant data is maximally correlated at every observable
                // lag; record the saturated range.
                value = max_lag;
            }
            stats.window_grid.push_back(value);
        }
    }
    finalize_local_stats(stats);
    return stats;
}

}  // namespace csc
