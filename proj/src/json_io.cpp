#include "csc/json_io.hpp"

namespace csc {

nlohmann::json grf_spec_to_json(const GrfSpec& spec) {
    nlohmann::json components = nlohmann::json::array();
    for (const auto& c : spec.components) {
        components.push_back({{"range", c.range}, {"weight", c.weight}});
    }
    return nlohmann::json{{"type", "grf"},          {"nx", spec.nx},
                          {"ny", spec.ny},          {"components", components},
                          {"variance", spec.variance}, {"mean", spec.mean},
                          {"seed", spec.seed}};
}

nlohmann::json fitted_variogram_to_json(const FittedVariogram& fit) {
    return nlohmann::json{{"c0", fit.sill},
                          {"a", fit.range},
                          {"model_form", model_form_name(fit.model_form)},
                          {"weighted_rss", fit.weighted_rss}};
}

nlohmann::json variogram_to_json(const VariogramEstimate& estimate, const FittedVariogram* fit) {
    nlohmann::json bins = nlohmann::json::array();
    for (const auto& b : estimate.bins) {
        bins.push_back(nlohmann::json::array({b.lag, b.gamma, b.pair_count}));
    }
    nlohmann::json doc{{"bins", bins},
                       {"max_lag", estimate.max_lag},
                       {"subsample_stride", estimate.subsample_stride}};
    if (fit) doc["fit"] = fitted_variogram_to_json(*fit);
    return doc;
}

nlohmann::json local_stats_to_json(const LocalStats& stats, double threshold) {
    nlohmann::json doc{{"statistic_name", stats.statistic_name},
                       {"H", stats.window_size},
                       {"windows_x", stats.windows_x},
                       {"windows_y", stats.windows_y},
                       {"values", stats.window_grid},
                       {"mean", stats.mean},
                       {"std", stats.std}};
    if (threshold >= 0.0) doc["threshold"] = threshold;
    return doc;
}

nlohmann::json record_to_json(const CompressionRecord& record) {
    return nlohmann::json{{"field_id", record.field_id},
                          {"codec_id", record.codec_id},
                          {"eb", record.eb},
                          {"original_bytes", record.original_bytes},
                          {"compressed_bytes", record.compressed_bytes},
                          {"compression_ratio", record.compression_ratio},
                          {"max_abs_error", record.max_abs_error},
                          {"psnr", record.psnr},
                          {"encode_seconds", record.encode_seconds},
                          {"decode_seconds", record.decode_seconds}};
}

}  // namespace csc
