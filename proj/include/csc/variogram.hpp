#ifndef CSC_VARIOGRAM_HPP
#define CSC_VARIOGRAM_HPP

#include <string>
#include <vector>

#include "csc/field.hpp"

namespace csc {

struct VariogramBin {
    double lag = 0.0;       // integer lag bin, grid units
    double gamma = 0.0;     // semi-variance
    long long pair_count = 0;
};

struct VariogramEstimate {
    std::vector<VariogramBin> bins;  // strictly increasing lags, pair_count >= 1
    double max_lag = 0.0;
    int subsample_stride = 1;
};

enum class VariogramModel { a_squared, a_linear };

std::string model_form_name(VariogramModel m);
VariogramModel parse_model_form(const std::string& name);

// Fitted squared-exponential model gamma(h) = c0 * (1 - exp(-h^2 / D)),
// D = a^2 for a_squared (default) or D = a for a_linear.
struct FittedVariogram {
    double sill = 0.0;          // c0
    double range = 0.0;         // a
    double weighted_rss = 0.0;  // pair-count-weighted residual sum of squares
    VariogramModel model_form = VariogramModel::a_squared;
};

// Per-window statistic grid plus population summary.
struct LocalStats {
    int window_size = 0;  // H
    std::string statistic_name;
    int windows_x = 0;
    int windows_y = 0;
    std::vector<double> window_grid;  // row-major, windows_y rows
    double mean = 0.0;
    double std = 0.0;  // population standard deviation
};

// Empirical semi-variogram with integer lag bins (rounded Euclidean offset
// distance). Anchors are subsampled every `stride` pixels in each dimension;
// stride=1 enumerates every in-range pair exactly once.
VariogramEstimate empirical_variogram(const Field2D& field, double max_lag, int stride);

// Smallest stride keeping the estimated pair-enumeration work under 1e8.
int auto_stride(int nx, int ny, double max_lag);

// Weighted least squares of the parametric model; for a candidate range the
// sill is closed-form, and the range is located by a coarse scan plus
// golden-section refinement over [0.5, 4*max_lag] to 1e-6 relative tolerance.
FittedVariogram fit_range(const VariogramEstimate& v,
                          VariogramModel model_form = VariogramModel::a_squared);

// empirical_variogram with max_lag = min(nx,ny)/4 and auto stride, then
// fit_range. The "global variogram range" statistic.
FittedVariogram global_range(const Field2D& field);

// Tiles the field with complete H x H windows and fits a range per window
// (max_lag = H/2, stride 1). Degenerate windows record the saturated value
// max_lag. statistic_name = "local_vario_range".
LocalStats local_variogram_stats(const Field2D& field, int window_size);

// Population mean/std in a fixed accumulation order (row-major windows).
void finalize_local_stats(LocalStats& stats);

}  // namespace csc

#endif
