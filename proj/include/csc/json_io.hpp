#ifndef CSC_JSON_IO_HPP
#define CSC_JSON_IO_HPP

#include <json.hpp>

#include "csc/codec.hpp"
#include "csc/grf.hpp"
#include "csc/variogram.hpp"

namespace csc {

nlohmann::json grf_spec_to_json(const GrfSpec& spec);

// {bins: [[h, gamma, n], ...], fit: {c0, a, model_form, weighted_rss}}
nlohmann::json variogram_to_json(const VariogramEstimate& estimate, const FittedVariogram* fit);

nlohmann::json fitted_variogram_to_json(const FittedVariogram& fit);

// {statistic_name, H, threshold, values: [...], mean, std}
nlohmann::json local_stats_to_json(const LocalStats& stats, double threshold = -1.0);

nlohmann::json record_to_json(const CompressionRecord& record);

}  // namespace csc

#endif
