#include "csc/regression.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "csc/errors.hpp"

namespace csc {

RegressionFit fit_log_regression(const std::vector<RegressionPoint>& points) {
    if (points.size() < 3) {
        throw insufficient_data_error("log regression needs >= 3 points, got " +
                                      std::to_string(points.size()));
    }
    for (const auto& p : points) {
        if (!(p.x > 0.0) || !std::isfinite(p.x)) {
            throw domain_error("log regression requires every x > 0, got " + std::to_string(p.x));
        }
        if (!std::isfinite(p.cr)) {
            throw domain_error("log regression requires finite cr values");
        }
    }
    const double n = static_cast<double>(points.size());
    double sum_u = 0.0, sum_y = 0.0;
    for (const auto& p : points) {
        sum_u += std::log(p.x);
        sum_y += p.cr;
    }
    const double mean_u = sum_u / n, mean_y = sum_y / n;
    double suu = 0.0, suy = 0.0;
    for (const auto& p : points) {
        const double du = std::log(p.x) - mean_u;
        suu += du * du;
        suy += du * (p.cr - mean_y);
    }
    if (suu <= 0.0) {
        throw rank_deficiency_error("log regression is rank deficient: all x values are equal");
    }

    RegressionFit fit;
    fit.n = static_cast<long long>(points.size());
    fit.beta = suy / suu;
    fit.alpha = mean_y - fit.beta * mean_u;
    double rss = 0.0, tss = 0.0;
    for (const auto& p : points) {
        const double res = p.cr - (fit.alpha + fit.beta * std::log(p.x));
        rss += res * res;
        tss += (p.cr - mean_y) * (p.cr - mean_y);
    }
    fit.r_squared = tss > 0.0 ? std::clamp(1.0 - rss / tss, 0.0, 1.0) : 1.0;
    fit.residual_std = std::sqrt(std::max(rss, 0.0) / (n - 2.0));
    return fit;
}

GroupFitReport fit_groups(const std::vector<GroupedPoint>& points,
                          const std::string& predictor_name) {
    const auto& known = known_predictors();
    if (std::find(known.begin(), known.end(), predictor_name) == known.end()) {
        std::string names;
        for (const auto& k : known) names += (names.empty() ? "" : ", ") + k;
        throw parameter_error("unknown predictor '" + predictor_name + "' (expected one of: " +
                              names + ")");
    }

    std::map<std::pair<std::string, double>, std::vector<GroupedPoint>> grouped;
    for (const auto& p : points) grouped[{p.codec_id, p.eb}].push_back(p);

    GroupFitReport report;
    for (const auto& [key, group] : grouped) {
        std::vector<RegressionPoint> usable;
        for (const auto& p : group) {
            if (std::isfinite(p.x) && p.x > 0.0 && std::isfinite(p.cr)) {
                usable.push_back({p.x, p.cr});
            }
        }
        const std::string label = key.first + " eb=" + std::to_string(key.second);
        if (usable.size() < 3) {
            report.skipped.push_back(label + ": only " + std::to_string(usable.size()) +
                                     " usable points (need 3)");
            continue;
        }
        try {
            RegressionFit fit = fit_log_regression(usable);
            fit.predictor_name = predictor_name;
            fit.codec_id = key.first;
            fit.eb = key.second;
            report.fits.push_back(fit);
            report.groups.push_back(group);
        } catch (const rank_deficiency_error&) {
            report.skipped.push_back(label + ": all predictor values equal");
        }
    }
    return report;
}

}  // namespace csc
