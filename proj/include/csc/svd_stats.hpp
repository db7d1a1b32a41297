#ifndef CSC_SVD_STATS_HPP
#define CSC_SVD_STATS_HPP

#include <vector>

#include "csc/field.hpp"
#include "csc/variogram.hpp"  // LocalStats

namespace csc {

struct TruncationLevel {
    int k = 1;                          // number of singular modes
    double energy_fraction_at_k = 1.0;  // in (0, 1]
};

// Singular values of the window's value matrix (ny rows x nx cols), in
// descending order, via one-sided Jacobi. Accurate to ~1e-12 relative for the
// window sizes the toolkit uses.
std::vector<double> singular_values(const Field2D& window);

// Mean-centers the window (unless center=false, which keeps raw energy),
// computes its singular values and returns the smallest k whose leading
// squared singular values reach `threshold` of the total energy. A constant
// window returns k=1 with energy fraction 1.
TruncationLevel svd_truncation_level(const Field2D& window, double threshold = 0.99,
                                     bool center = true);

// Tiles the field with complete H x H windows and records each window's
// truncation level. statistic_name = "svd_truncation_std".
LocalStats local_svd_stats(const Field2D& field, int window_size, double threshold = 0.99,
                           bool center = true);

}  // namespace csc

#endif
