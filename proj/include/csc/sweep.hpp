#ifndef CSC_SWEEP_HPP
#define CSC_SWEEP_HPP

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "csc/grf.hpp"
#include "csc/raw_io.hpp"
#include "csc/records.hpp"
#include "csc/regression.hpp"

namespace csc {

// One statistic requested over every field of the sweep. The CSV column name
// encodes the window: global_range, local_vario_std_H32, local_svd_std_H32.
struct StatRequest {
    std::string name;          // global_range | local_vario_std | local_svd_std
    int window = 32;           // H, for the local statistics
    double threshold = 0.99;   // SVD energy threshold

    std::string column() const;
};

struct CodecSpec {
    std::string id;
    std::string compress_template;    // external codecs only
    std::string decompress_template;  // external codecs only
    CodecOptions options;
};

// A config field entry; "grf" yields one field, "grf_sweep" a cross product
// of single-range fields, "raw" one field per slice index.
struct FieldEntry {
    enum class Kind { grf, grf_sweep, raw } kind = Kind::grf;
    GrfSpec grf;                       // grf
    std::vector<double> sweep_ranges;  // grf_sweep
    std::vector<std::uint64_t> sweep_seeds;
    std::string path;                  // raw
    std::vector<long long> dims;
    RawDtype dtype = RawDtype::float64;
    ByteOrder order = ByteOrder::little;
    int slice_axis = 0;
    std::vector<long long> slice_indices;
};

struct ExperimentConfig {
    std::vector<FieldEntry> fields;
    std::vector<CodecSpec> codecs;
    std::vector<double> error_bounds;
    std::vector<StatRequest> statistics;
    std::string output_dir = ".";
    std::uint64_t seed = 0;  // added to every generator seed
    nlohmann::json source;   // the parsed document, persisted in the manifest
};

ExperimentConfig parse_experiment_config(const nlohmann::json& doc);
ExperimentConfig load_experiment_config(const std::string& path);

// Expands the config entries into concrete fields (generated or loaded).
std::vector<Field2D> materialize_fields(const ExperimentConfig& config);

// Statistic value for one field; NaN when the estimate is degenerate
// (e.g. global range of a constant field).
double compute_statistic(const Field2D& field, const StatRequest& request);

// Runs every (field, codec, error bound) job, joining statistics computed
// once per field. Job-level parallelism follows the CSC_THREADS environment
// variable (default 1); rows come out in canonical config order either way.
// A bound violation aborts the sweep naming the offending triple.
RecordsTable run_sweep(const ExperimentConfig& config);

// Writes records.csv (deterministic; timing cells empty), timings.csv
// (measured wall times) and manifest.json under config.output_dir.
void write_sweep_outputs(const ExperimentConfig& config, const RecordsTable& table);

// fits CSV: codec,eb,predictor,alpha,beta,r2,residual_std,n
void write_fits_csv(const std::string& path, const std::vector<RegressionFit>& fits);

// Per-point residual report for manual outlier inspection:
// codec,eb,predictor,x,cr,fitted,residual
void write_residuals_csv(const std::string& path, const GroupFitReport& report);

// Resolves a predictor name to the matching records column (exact column
// names are also accepted). Throws schema_error when absent.
std::string resolve_predictor_column(const RecordsTable& table, const std::string& predictor);

GroupFitReport fit_records(const RecordsTable& table, const std::string& predictor,
                           const std::vector<double>& exclude_ebs = {});

// One plot-ready CSV per (codec, predictor) panel: point rows plus 100
// fitted-curve samples per error-bound group. Every row's bound is
// re-verified. Returns the written file names.
std::vector<std::string> write_report(const RecordsTable& table, const std::string& predictor,
                                      const std::string& out_dir,
                                      const std::vector<double>& exclude_ebs = {});

}  // namespace csc

#endif
