#ifndef CSC_REGRESSION_HPP
#define CSC_REGRESSION_HPP

#include <string>
#include <vector>

namespace csc {

// Ordinary least squares fit of cr = alpha + beta * log(x) + eps.
struct RegressionFit {
    double alpha = 0.0;
    double beta = 0.0;
    long long n = 0;
    double r_squared = 0.0;
    double residual_std = 0.0;  // sqrt(RSS / (n - 2))
    std::string predictor_name;
    std::string codec_id;
    double eb = 0.0;
};

struct RegressionPoint {
    double x = 0.0;   // predictor value, > 0
    double cr = 0.0;  // compression ratio
};

RegressionFit fit_log_regression(const std::vector<RegressionPoint>& points);

// One record row already joined with its statistics.
struct GroupedPoint {
    std::string codec_id;
    double eb = 0.0;
    double x = 0.0;
    double cr = 0.0;
};

struct GroupFitReport {
    std::vector<RegressionFit> fits;                 // sorted by (codec_id, eb)
    std::vector<std::string> skipped;                // human-readable reasons
    std::vector<std::vector<GroupedPoint>> groups;   // points behind each fit
};

inline const std::vector<std::string>& known_predictors() {
    static const std::vector<std::string> names{"global_range", "local_vario_std",
                                                "local_svd_std"};
    return names;
}

// Partitions by (codec_id, eb) and fits each group with >= 3 usable points
// (finite, x > 0). Underpopulated or degenerate groups are reported as
// skipped, not fatal.
GroupFitReport fit_groups(const std::vector<GroupedPoint>& points,
                          const std::string& predictor_name);

}  // namespace csc

#endif
