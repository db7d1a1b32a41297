// csc: synthesize correlated fields, measure their correlation statistics,
// compress them with error-bounded codecs and fit compression-ratio models.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "csc/codec.hpp"
#include "csc/errors.hpp"
#include "csc/external_codec.hpp"
#include "csc/grf.hpp"
#include "csc/json_io.hpp"
#include "csc/raw_io.hpp"
#include "csc/records.hpp"
#include "csc/svd_stats.hpp"
#include "csc/sweep.hpp"
#include "csc/variogram.hpp"
#include "csc/version.hpp"

namespace {

namespace fs = std::filesystem;

struct GenArgs {
    int nx = 1028, ny = 1028;
    std::vector<double> ranges;
    std::vector<double> weights;
    double variance = 1.0;
    double mean = 0.0;
    std::uint64_t seed = 0;
    std::string id;
    std::string out;
};

int cmd_gen(const GenArgs& args) {
    csc::GrfSpec spec;
    spec.nx = args.nx;
    spec.ny = args.ny;
    spec.variance = args.variance;
    spec.mean = args.mean;
    spec.seed = args.seed;
    spec.field_id = args.id;
    std::vector<double> ranges = args.ranges.empty() ? std::vector<double>{8.0} : args.ranges;
    spec.components.clear();
    for (size_t i = 0; i < ranges.size(); ++i) {
        const double w = i < args.weights.size() ? args.weights[i] : 1.0 / ranges.size();
        spec.components.push_back({ranges[i], w});
    }
    const csc::Field2D field = csc::generate_grf(spec);
    csc::save_raw_field(field, args.out);
    csc::save_field_sidecar(field, args.out, csc::grf_spec_to_json(spec).dump());
    std::cout << "wrote " << args.out << " (" << field.nx << "x" << field.ny << ", id "
              << field.field_id << ")\n";
    return 0;
}

struct IngestArgs {
    std::string in;
    std::vector<long long> dims;
    std::string dtype = "float64";
    std::string byte_order = "little";
    int slice_axis = 0;
    long long slice_index = 0;
    std::string out;
    std::string id;
};

int cmd_ingest(const IngestArgs& args) {
    csc::Field2D field =
        csc::load_raw_field(args.in, args.dims, csc::parse_dtype(args.dtype),
                            csc::parse_byte_order(args.byte_order), args.slice_axis,
                            args.slice_index);
    if (!args.id.empty()) field.field_id = args.id;
    csc::save_raw_field(field, args.out);
    csc::save_field_sidecar(field, args.out);
    std::cout << "wrote " << args.out << " (" << field.nx << "x" << field.ny << ", id "
              << field.field_id << ")\n";
    return 0;
}

struct StatsArgs {
    std::string in;
    int nx = 0, ny = 0;
    bool global_variogram = false;
    bool local_vario = false;
    bool local_svd = false;
    bool svd_raw_energy = false;
    int window = 32;
    double threshold = 0.99;
    double max_lag = 0.0;  // 0: default min(nx,ny)/4
    int stride = 0;        // 0: auto
    std::string model_form = "a_squared";
    std::string out;
};

csc::Field2D load_input_field(const std::string& path, int nx, int ny) {
    if (nx > 0 && ny > 0) {
        return csc::load_raw_field(path, {ny, nx});
    }
    return csc::load_field_with_sidecar(path);
}

int cmd_stats(const StatsArgs& args) {
    const csc::Field2D field = load_input_field(args.in, args.nx, args.ny);
    nlohmann::json doc{{"field_id", field.field_id}, {"nx", field.nx}, {"ny", field.ny}};
    const bool anything = args.global_variogram || args.local_vario || args.local_svd;
    if (args.global_variogram || !anything) {
        const double max_lag = args.max_lag > 0.0
                                   ? args.max_lag
                                   : std::max(1.0, std::floor(std::min(field.nx, field.ny) / 4.0));
        const int stride =
            args.stride > 0 ? args.stride : csc::auto_stride(field.nx, field.ny, max_lag);
        const csc::VariogramEstimate estimate = csc::empirical_variogram(field, max_lag, stride);
        const csc::FittedVariogram fit =
            csc::fit_range(estimate, csc::parse_model_form(args.model_form));
        doc["global_variogram"] = csc::variogram_to_json(estimate, &fit);
    }
    if (args.local_vario) {
        doc["local_vario"] = csc::local_stats_to_json(csc::local_variogram_stats(field, args.window));
    }
    if (args.local_svd) {
        doc["local_svd"] = csc::local_stats_to_json(
            csc::local_svd_stats(field, args.window, args.threshold, !args.svd_raw_energy),
            args.threshold);
    }
    if (args.out.empty()) {
        std::cout << doc.dump(2) << "\n";
    } else {
        std::ofstream out(args.out, std::ios::trunc);
        out << doc.dump(2) << "\n";
        if (!out) throw csc::input_error("cannot write '" + args.out + "'");
    }
    return 0;
}

struct CompressArgs {
    std::string in;
    int nx = 0, ny = 0;
    std::string codec = "sz-like";
    double eb = 1e-3;
    std::string out;
    std::string record_path;
    std::string reconstructed_path;
    std::string compress_template;
    std::string decompress_template;
};

int cmd_compress(const CompressArgs& args) {
    const csc::Field2D field = load_input_field(args.in, args.nx, args.ny);
    std::optional<csc::ExternalCodec> external;
    const csc::Codec* codec;
    if (args.codec.rfind("external:", 0) == 0) {
        if (args.compress_template.empty() || args.decompress_template.empty()) {
            throw csc::parameter_error(
                "external codecs need --compress-template and --decompress-template");
        }
        external.emplace(args.codec.substr(9), args.compress_template, args.decompress_template);
        codec = &*external;
    } else {
        codec = &csc::builtin_codec(args.codec);
    }
    const csc::CodecRun run = csc::run_codec_checked(*codec, field, args.eb);
    if (!args.out.empty()) csc::write_blob_file(run.blob, args.out);
    if (!args.reconstructed_path.empty()) {
        csc::save_raw_field(run.reconstructed, args.reconstructed_path);
        csc::save_field_sidecar(run.reconstructed, args.reconstructed_path);
    }
    const nlohmann::json record = csc::record_to_json(run.record);
    if (!args.record_path.empty()) {
        std::ofstream out(args.record_path, std::ios::trunc);
        out << record.dump(2) << "\n";
        if (!out) throw csc::input_error("cannot write '" + args.record_path + "'");
    }
    std::cout << record.dump(2) << "\n";
    return 0;
}

struct SweepArgs {
    std::string config_path;
    std::string out_dir;
};

int cmd_sweep(const SweepArgs& args) {
    csc::ExperimentConfig config = csc::load_experiment_config(args.config_path);
    if (!args.out_dir.empty()) config.output_dir = args.out_dir;
    const csc::RecordsTable table = csc::run_sweep(config);
    csc::write_sweep_outputs(config, table);
    std::cout << "wrote " << (fs::path(config.output_dir) / "records.csv").string() << " ("
              << table.rows.size() << " rows)\n";
    return 0;
}

struct FitArgs {
    std::string records_path;
    std::string predictor = "global_range";
    std::string out;
    std::string residuals_path;
    std::vector<double> exclude_ebs;
};

int cmd_fit(const FitArgs& args) {
    const csc::RecordsTable table = csc::read_records_csv(args.records_path);
    const csc::GroupFitReport report = csc::fit_records(table, args.predictor, args.exclude_ebs);
    for (const auto& s : report.skipped) std::cerr << "skipped group: " << s << "\n";
    if (!args.residuals_path.empty()) csc::write_residuals_csv(args.residuals_path, report);
    if (args.out.empty()) {
        for (const auto& f : report.fits) {
            std::cout << f.codec_id << " eb=" << csc::format_double(f.eb) << " alpha="
                      << csc::format_double(f.alpha) << " beta=" << csc::format_double(f.beta)
                      << " r2=" << csc::format_double(f.r_squared) << " n=" << f.n << "\n";
        }
    } else {
        csc::write_fits_csv(args.out, report.fits);
        std::cout << "wrote " << args.out << " (" << report.fits.size() << " fits)\n";
    }
    return 0;
}

struct ReportArgs {
    std::string records_path;
    std::vector<std::string> predictors;
    std::string out_dir = ".";
    std::vector<double> exclude_ebs;
};

int cmd_report(const ReportArgs& args) {
    const csc::RecordsTable table = csc::read_records_csv(args.records_path);
    std::vector<std::string> predictors = args.predictors;
    if (predictors.empty()) predictors = table.stat_columns;
    if (predictors.empty()) {
        throw csc::schema_error("records carry no statistic columns to report on");
    }
    size_t files = 0;
    for (const auto& predictor : predictors) {
        for (const auto& path :
             csc::write_report(table, predictor, args.out_dir, args.exclude_ebs)) {
            std::cout << "wrote " << path << "\n";
            ++files;
        }
    }
    std::cout << files << " panel files under " << args.out_dir << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"correlation-structure compressibility toolkit"};
    app.set_version_flag("--version", csc::kToolVersion);
    app.require_subcommand(1);

    GenArgs gen;
    auto* gen_cmd = app.add_subcommand("gen", "generate a Gaussian random field");
    gen_cmd->add_option("--nx", gen.nx, "grid columns");
    gen_cmd->add_option("--ny", gen.ny, "grid rows");
    gen_cmd->add_option("--range,-a", gen.ranges, "correlation range (repeat for multi-range)");
    gen_cmd->add_option("--weight", gen.weights, "variance weight per range (default equal)");
    gen_cmd->add_option("--variance", gen.variance, "field variance");
    gen_cmd->add_option("--mean", gen.mean, "field mean");
    gen_cmd->add_option("--seed", gen.seed, "generator seed");
    gen_cmd->add_option("--id", gen.id, "field id (default derived)");
    gen_cmd->add_option("--out,-o", gen.out, "output raw file")->required();

    IngestArgs ingest;
    auto* ingest_cmd = app.add_subcommand("ingest", "slice a raw binary volume into a 2D field");
    ingest_cmd->add_option("--in,-i", ingest.in, "input raw file")->required();
    ingest_cmd->add_option("--dims", ingest.dims, "2 or 3 dimensions, slowest first")
        ->required()
        ->expected(2, 3);
    ingest_cmd->add_option("--dtype", ingest.dtype, "float32|float64");
    ingest_cmd->add_option("--byte-order", ingest.byte_order, "little|big");
    ingest_cmd->add_option("--slice-axis", ingest.slice_axis, "axis to slice (3D input)");
    ingest_cmd->add_option("--slice-index", ingest.slice_index, "slice index");
    ingest_cmd->add_option("--id", ingest.id, "field id");
    ingest_cmd->add_option("--out,-o", ingest.out, "output raw file")->required();

    StatsArgs stats;
    auto* stats_cmd = app.add_subcommand("stats", "correlation statistics of a field");
    stats_cmd->add_option("--in,-i", stats.in, "input raw file (sidecar supplies dims)")->required();
    stats_cmd->add_option("--nx", stats.nx, "grid columns (overrides sidecar)");
    stats_cmd->add_option("--ny", stats.ny, "grid rows (overrides sidecar)");
    stats_cmd->add_flag("--global-variogram", stats.global_variogram,
                        "global variogram range (default when nothing else asked)");
    stats_cmd->add_flag("--local-vario", stats.local_vario, "windowed variogram-range stats");
    stats_cmd->add_flag("--local-svd", stats.local_svd, "windowed SVD truncation-level stats");
    stats_cmd->add_option("--window,-H", stats.window, "window size H");
    stats_cmd->add_option("--svd-threshold", stats.threshold, "SVD energy threshold");
    stats_cmd->add_flag("--svd-raw-energy", stats.svd_raw_energy,
                        "skip mean-centering before the window SVD");
    stats_cmd->add_option("--max-lag", stats.max_lag, "variogram max lag (default min(nx,ny)/4)");
    stats_cmd->add_option("--stride", stats.stride, "anchor stride (default auto)");
    stats_cmd->add_option("--model-form", stats.model_form, "a_squared|a_linear");
    stats_cmd->add_option("--out,-o", stats.out, "output JSON (default stdout)");

    CompressArgs compress;
    auto* compress_cmd = app.add_subcommand("compress", "error-bounded compression of a field");
    compress_cmd->add_option("--in,-i", compress.in, "input raw file")->required();
    compress_cmd->add_option("--nx", compress.nx, "grid columns (overrides sidecar)");
    compress_cmd->add_option("--ny", compress.ny, "grid rows (overrides sidecar)");
    compress_cmd->add_option("--codec", compress.codec,
                             "sz-like|zfp-like|mgard-like|external:<name>");
    compress_cmd->add_option("--eb", compress.eb, "absolute error bound")->required();
    compress_cmd->add_option("--out,-o", compress.out, "compressed blob path");
    compress_cmd->add_option("--record", compress.record_path, "write the record JSON here too");
    compress_cmd->add_option("--reconstructed", compress.reconstructed_path,
                             "write the reconstructed field");
    compress_cmd->add_option("--compress-template", compress.compress_template,
                             "external codec: command with {input} {output} {eb}");
    compress_cmd->add_option("--decompress-template", compress.decompress_template,
                             "external codec: companion command");

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "run a full experiment config");
    sweep_cmd->add_option("--config,-c", sweep.config_path, "experiment config JSON")->required();
    sweep_cmd->add_option("--out,-o", sweep.out_dir, "output directory (overrides config)");

    FitArgs fit;
    auto* fit_cmd = app.add_subcommand("fit", "fit CR = alpha + beta*log(x) per (codec, eb)");
    fit_cmd->add_option("--records,-r", fit.records_path, "records.csv from sweep")->required();
    fit_cmd->add_option("--predictor,-p", fit.predictor,
                        "global_range|local_vario_std|local_svd_std or exact column");
    fit_cmd->add_option("--exclude-eb", fit.exclude_ebs, "drop these error bounds");
    fit_cmd->add_option("--residuals", fit.residuals_path,
                        "write per-point residuals here for outlier inspection");
    fit_cmd->add_option("--out,-o", fit.out, "fits CSV path (default: print)");

    ReportArgs report;
    auto* report_cmd = app.add_subcommand("report", "plot-ready per-panel CSVs");
    report_cmd->add_option("--records,-r", report.records_path, "records.csv from sweep")
        ->required();
    report_cmd->add_option("--predictor,-p", report.predictors,
                           "statistic columns to report (default all)");
    report_cmd->add_option("--exclude-eb", report.exclude_ebs, "drop these error bounds");
    report_cmd->add_option("--out,-o", report.out_dir, "output directory");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen_cmd->parsed()) return cmd_gen(gen);
        if (ingest_cmd->parsed()) return cmd_ingest(ingest);
        if (stats_cmd->parsed()) return cmd_stats(stats);
        if (compress_cmd->parsed()) return cmd_compress(compress);
        if (sweep_cmd->parsed()) return cmd_sweep(sweep);
        if (fit_cmd->parsed()) return cmd_fit(fit);
        if (report_cmd->parsed()) return cmd_report(report);
    } catch (const csc::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
