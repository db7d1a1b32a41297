#include "csc/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <memory>
#include <mutex>
#include <set>
#include <thread>

#include "csc/errors.hpp"
#include "csc/external_codec.hpp"
#include "csc/svd_stats.hpp"
#include "csc/variogram.hpp"
#include "csc/version.hpp"

namespace csc {

namespace fs = std::filesystem;

std::string StatRequest::column() const {
    if (name == "global_range") return name;
    return name + "_H" + std::to_string(window);
}

namespace {

StatRequest parse_stat(const nlohmann::json& j) {
    StatRequest s;
    if (j.is_string()) {
        s.name = j.get<std::string>();
    } else {
        s.name = j.at("name").get<std::string>();
        s.window = j.value("H", 32);
        s.threshold = j.value("threshold", 0.99);
    }
    const auto& known = known_predictors();
    if (std::find(known.begin(), known.end(), s.name) == known.end()) {
        throw schema_error("unknown statistic '" + s.name + "'");
    }
    return s;
}

GrfSpec parse_grf_common(const nlohmann::json& j) {
    GrfSpec spec;
    spec.nx = j.value("nx", 1028);
    spec.ny = j.value("ny", 1028);
    spec.variance = j.value("variance", 1.0);
    spec.mean = j.value("mean", 0.0);
    spec.seed = j.value("seed", 0ULL);
    spec.field_id = j.value("id", std::string{});
    if (j.contains("components")) {
        spec.components.clear();
        for (const auto& c : j.at("components")) {
            spec.components.push_back({c.at("range").get<double>(), c.at("weight").get<double>()});
        }
    } else if (j.contains("range")) {
        spec.components = {{j.at("range").get<double>(), 1.0}};
    }
    return spec;
}

FieldEntry parse_field_entry(const nlohmann::json& j) {
    FieldEntry entry;
    const std::string type = j.value("type", "grf");
    if (type == "grf") {
        entry.kind = FieldEntry::Kind::grf;
        entry.grf = parse_grf_common(j);
    } else if (type == "grf_sweep") {
        entry.kind = FieldEntry::Kind::grf_sweep;
        entry.grf = parse_grf_common(j);
        entry.sweep_ranges = j.at("ranges").get<std::vector<double>>();
        entry.sweep_seeds = j.value("seeds", std::vector<std::uint64_t>{0});
        if (entry.sweep_ranges.empty()) throw schema_error("grf_sweep: 'ranges' must be non-empty");
    } else if (type == "raw") {
        entry.kind = FieldEntry::Kind::raw;
        entry.path = j.at("path").get<std::string>();
        entry.dims = j.at("dims").get<std::vector<long long>>();
        entry.dtype = parse_dtype(j.value("dtype", "float64"));
        entry.order = parse_byte_order(j.value("byte_order", "little"));
        entry.slice_axis = j.value("slice_axis", 0);
        if (j.contains("slice_indices")) {
            entry.slice_indices = j.at("slice_indices").get<std::vector<long long>>();
        } else {
            entry.slice_indices = {j.value("slice_index", 0LL)};
        }
    } else {
        throw schema_error("unknown field entry type '" + type + "'");
    }
    return entry;
}

std::string sanitize_id(std::string id) {
    for (char& c : id) {
        if (c == ',' || c == '\n' || c == '\r') c = '_';
    }
    return id;
}

int env_threads() {
    const char* env = std::getenv("CSC_THREADS");
    if (!env) return 1;
    const int n = std::atoi(env);
    return n >= 1 ? n : 1;
}

class CodecPool {
  public:
    explicit CodecPool(const std::vector<CodecSpec>& specs) {
        for (const auto& spec : specs) {
            if (spec.id.rfind("external:", 0) == 0) {
                if (spec.compress_template.empty() || spec.decompress_template.empty()) {
                    throw validation_error("external codec '" + spec.id +
                                           "' needs compress_template and decompress_template");
                }
                owned_.push_back(std::make_unique<ExternalCodec>(
                    spec.id.substr(9), spec.compress_template, spec.decompress_template));
                codecs_.push_back(owned_.back().get());
            } else {
                codecs_.push_back(&builtin_codec(spec.id));
            }
        }
    }
    const Codec& at(size_t i) const { return *codecs_[i]; }

  private:
    std::vector<std::unique_ptr<Codec>> owned_;
    std::vector<const Codec*> codecs_;
};

}  // namespace

ExperimentConfig parse_experiment_config(const nlohmann::json& doc) {
    ExperimentConfig config;
    config.source = doc;
    if (!doc.contains("fields") || !doc.contains("codecs") || !doc.contains("error_bounds")) {
        throw schema_error("config needs 'fields', 'codecs' and 'error_bounds'");
    }
    for (const auto& f : doc.at("fields")) config.fields.push_back(parse_field_entry(f));
    for (const auto& c : doc.at("codecs")) {
        CodecSpec spec;
        if (c.is_string()) {
            spec.id = c.get<std::string>();
        } else {
            spec.id = c.at("id").get<std::string>();
            spec.compress_template = c.value("compress_template", std::string{});
            spec.decompress_template = c.value("decompress_template", std::string{});
            if (c.contains("options")) {
                for (const auto& [k, v] : c.at("options").items()) {
                    spec.options[k] = v.is_string() ? v.get<std::string>() : v.dump();
                }
            }
        }
        config.codecs.push_back(std::move(spec));
    }
    config.error_bounds = doc.at("error_bounds").get<std::vector<double>>();
    if (doc.contains("statistics")) {
        for (const auto& s : doc.at("statistics")) config.statistics.push_back(parse_stat(s));
    }
    config.output_dir = doc.value("output_dir", ".");
    config.seed = doc.value("seed", 0ULL);

    if (config.fields.empty()) throw validation_error("config: 'fields' must be non-empty");
    if (config.codecs.empty()) throw validation_error("config: 'codecs' must be non-empty");
    if (config.error_bounds.empty()) {
        throw validation_error("config: 'error_bounds' must be non-empty");
    }
    for (double eb : config.error_bounds) {
        if (!(eb > 0.0) || !std::isfinite(eb)) {
            throw validation_error("config: every error bound must be > 0");
        }
    }
    // Resolve built-in ids early so typos fail before any work happens.
    CodecPool probe(config.codecs);
    (void)probe;
    return config;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open config '" + path + "'");
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw schema_error("config '" + path + "' is not valid JSON: " + e.what());
    }
    try {
        return parse_experiment_config(doc);
    } catch (const nlohmann::json::exception& e) {
        throw schema_error("config '" + path + "': " + e.what());
    }
}

std::vector<Field2D> materialize_fields(const ExperimentConfig& config) {
    std::vector<Field2D> fields;
    for (const auto& entry : config.fields) {
        switch (entry.kind) {
            case FieldEntry::Kind::grf: {
                GrfSpec spec = entry.grf;
                spec.seed += config.seed;
                fields.push_back(generate_grf(spec));
                break;
            }
            case FieldEntry::Kind::grf_sweep: {
                for (double a : entry.sweep_ranges) {
                    for (std::uint64_t s : entry.sweep_seeds) {
                        GrfSpec spec = entry.grf;
                        spec.components = {{a, 1.0}};
                        spec.seed = config.seed + s;
                        spec.field_id.clear();
                        fields.push_back(generate_grf(spec));
                    }
                }
                break;
            }
            case FieldEntry::Kind::raw: {
                for (long long idx : entry.slice_indices) {
                    fields.push_back(load_raw_field(entry.path, entry.dims, entry.dtype,
                                                    entry.order, entry.slice_axis, idx));
                }
                break;
            }
        }
    }
    std::set<std::string> seen;
    for (auto& f : fields) {
        f.field_id = sanitize_id(f.field_id);
        if (!seen.insert(f.field_id).second) {
            throw validation_error("duplicate field id '" + f.field_id +
                                   "'; give entries distinct ids");
        }
    }
    return fields;
}

double compute_statistic(const Field2D& field, const StatRequest& request) {
    try {
        if (request.name == "global_range") return global_range(field).range;
        if (request.name == "local_vario_std") {
            return local_variogram_stats(field, request.window).std;
        }
        if (request.name == "local_svd_std") {
            return local_svd_stats(field, request.window, request.threshold).std;
        }
    } catch (const degenerate_field_error&) {
        return std::numeric_limits<double>::quiet_NaN();
    } catch (const insufficient_data_error&) {
        return std::numeric_limits<double>::quiet_NaN();
    }
    throw parameter_error("unknown statistic '" + request.name + "'");
}

namespace {

// Runs `count` indexed tasks on up to CSC_THREADS workers. Tasks write to
// disjoint slots, so results are identical at any worker count. The first
// exception wins and is rethrown after the pool drains.
template <typename Task>
void parallel_for_jobs(size_t count, const Task& task) {
    const int n_threads = std::min<int>(env_threads(), static_cast<int>(count));
    if (n_threads <= 1) {
        for (size_t i = 0; i < count; ++i) task(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
            while (!failed.load(std::memory_order_relaxed)) {
                const size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    task(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (!failed.exchange(true)) first_error = std::current_exception();
                }
            }
        });
    }
    for (auto& th : pool) th.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace

RecordsTable run_sweep(const ExperimentConfig& config) {
    const std::vector<Field2D> fields = materialize_fields(config);
    CodecPool codecs(config.codecs);

    std::vector<std::map<std::string, double>> stats(fields.size());
    const size_t n_stats = config.statistics.size();
    std::vector<double> stat_values(fields.size() * n_stats);
    parallel_for_jobs(fields.size() * n_stats, [&](size_t i) {
        stat_values[i] = compute_statistic(fields[i / n_stats], config.statistics[i % n_stats]);
    });
    for (size_t fi = 0; fi < fields.size(); ++fi) {
        for (size_t si = 0; si < n_stats; ++si) {
            stats[fi][config.statistics[si].column()] = stat_values[fi * n_stats + si];
        }
    }

    struct Job {
        size_t field = 0, codec = 0, eb = 0;
    };
    std::vector<Job> jobs;
    for (size_t fi = 0; fi < fields.size(); ++fi) {
        for (size_t ci = 0; ci < config.codecs.size(); ++ci) {
            for (size_t ei = 0; ei < config.error_bounds.size(); ++ei) {
                jobs.push_back({fi, ci, ei});
            }
        }
    }

    RecordsTable table;
    for (const auto& request : config.statistics) table.stat_columns.push_back(request.column());
    table.rows.resize(jobs.size());

    parallel_for_jobs(jobs.size(), [&](size_t i) {
        const Job& job = jobs[i];
        try {
            CodecRun run =
                run_codec_checked(codecs.at(job.codec), fields[job.field],
                                  config.error_bounds[job.eb], config.codecs[job.codec].options);
            table.rows[i].record = std::move(run.record);
            table.rows[i].statistics = stats[job.field];
        } catch (const std::exception& e) {
            throw error("sweep aborted at field '" + fields[job.field].field_id + "', codec '" +
                        config.codecs[job.codec].id + "', eb " +
                        format_double(config.error_bounds[job.eb]) + ": " + e.what());
        }
    });
    return table;
}

void write_sweep_outputs(const ExperimentConfig& config, const RecordsTable& table) {
    fs::create_directories(config.output_dir);
    const fs::path dir(config.output_dir);
    write_records_csv((dir / "records.csv").string(), table, /*include_timings=*/false);

    std::ofstream timings(dir / "timings.csv", std::ios::trunc);
    timings << "field_id,codec,eb,encode_seconds,decode_seconds\n";
    for (const auto& row : table.rows) {
        timings << row.record.field_id << "," << row.record.codec_id << ","
                << format_double(row.record.eb) << "," << format_double(row.record.encode_seconds)
                << "," << format_double(row.record.decode_seconds) << "\n";
    }

    nlohmann::json manifest{{"tool_version", kToolVersion}, {"config", config.source}};
    std::ofstream mf(dir / "manifest.json", std::ios::trunc);
    mf << manifest.dump(2) << "\n";
    if (!mf) throw input_error("cannot write manifest under '" + config.output_dir + "'");
}

void write_fits_csv(const std::string& path, const std::vector<RegressionFit>& fits) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw input_error("cannot create '" + path + "'");
    out << "codec,eb,predictor,alpha,beta,r2,residual_std,n\n";
    for (const auto& f : fits) {
        out << f.codec_id << "," << format_double(f.eb) << "," << f.predictor_name << ","
            << format_double(f.alpha) << "," << format_double(f.beta) << ","
            << format_double(f.r_squared) << "," << format_double(f.residual_std) << "," << f.n
            << "\n";
    }
}

void write_residuals_csv(const std::string& path, const GroupFitReport& report) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw input_error("cannot create '" + path + "'");
    out << "codec,eb,predictor,x,cr,fitted,residual\n";
    for (size_t g = 0; g < report.fits.size(); ++g) {
        const RegressionFit& fit = report.fits[g];
        for (const auto& p : report.groups[g]) {
            if (!std::isfinite(p.x) || p.x <= 0.0) continue;
            const double fitted = fit.alpha + fit.beta * std::log(p.x);
            out << fit.codec_id << "," << format_double(fit.eb) << "," << fit.predictor_name << ","
                << format_double(p.x) << "," << format_double(p.cr) << "," << format_double(fitted)
                << "," << format_double(p.cr - fitted) << "\n";
        }
    }
}

std::string resolve_predictor_column(const RecordsTable& table, const std::string& predictor) {
    std::vector<std::string> matches;
    for (const auto& c : table.stat_columns) {
        if (c == predictor) return c;
        if (c.rfind(predictor + "_H", 0) == 0) matches.push_back(c);
    }
    if (matches.size() == 1) return matches.front();
    if (matches.size() > 1) {
        std::string all;
        for (const auto& m : matches) all += (all.empty() ? "" : ", ") + m;
        throw parameter_error("predictor '" + predictor + "' is ambiguous; pass one of: " + all);
    }
    std::string all;
    for (const auto& c : table.stat_columns) all += (all.empty() ? "" : ", ") + c;
    throw schema_error("records have no column for predictor '" + predictor +
                       "' (available statistic columns: " + (all.empty() ? "none" : all) + ")");
}

namespace {

std::string canonical_predictor(const std::string& column) {
    for (const auto& name : known_predictors()) {
        if (column == name || column.rfind(name + "_H", 0) == 0) return name;
    }
    return column;
}

bool excluded(double eb, const std::vector<double>& exclude_ebs) {
    for (double e : exclude_ebs) {
        if (eb == e) return true;
    }
    return false;
}

}  // namespace

GroupFitReport fit_records(const RecordsTable& table, const std::string& predictor,
                           const std::vector<double>& exclude_ebs) {
    const std::string column = resolve_predictor_column(table, predictor);
    std::vector<GroupedPoint> points;
    for (const auto& row : table.rows) {
        if (excluded(row.record.eb, exclude_ebs)) continue;
        GroupedPoint p;
        p.codec_id = row.record.codec_id;
        p.eb = row.record.eb;
        p.x = row.statistics.at(column);
        p.cr = row.record.compression_ratio;
        points.push_back(p);
    }
    GroupFitReport report = fit_groups(points, canonical_predictor(column));
    for (auto& fit : report.fits) fit.predictor_name = column;
    return report;
}

std::vector<std::string> write_report(const RecordsTable& table, const std::string& predictor,
                                      const std::string& out_dir,
                                      const std::vector<double>& exclude_ebs) {
    for (const auto& row : table.rows) {
        if (!(row.record.max_abs_error <= row.record.eb)) {
            throw integrity_error("record for field '" + row.record.field_id + "', codec '" +
                                  row.record.codec_id + "' violates its bound: max |error| " +
                                  format_double(row.record.max_abs_error) + " > eb " +
                                  format_double(row.record.eb));
        }
    }
    const std::string column = resolve_predictor_column(table, predictor);
    fs::create_directories(out_dir);

    std::set<std::string> codec_ids;
    for (const auto& row : table.rows) codec_ids.insert(row.record.codec_id);

    std::vector<std::string> written;
    for (const auto& codec_id : codec_ids) {
        RecordsTable subset;
        subset.stat_columns = table.stat_columns;
        for (const auto& row : table.rows) {
            if (row.record.codec_id == codec_id && !excluded(row.record.eb, exclude_ebs)) {
                subset.rows.push_back(row);
            }
        }
        if (subset.rows.empty()) continue;
        GroupFitReport report = fit_records(subset, column, {});

        std::string name = "panel_" + codec_id + "_" + column + ".csv";
        for (char& c : name) {
            if (c == ':' || c == '/') c = '_';
        }
        const fs::path path = fs::path(out_dir) / name;
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw input_error("cannot create '" + path.string() + "'");
        out << "kind,codec,eb,x,value\n";
        for (const auto& row : subset.rows) {
            const double x = row.statistics.at(column);
            if (!std::isfinite(x)) continue;
            out << "point," << codec_id << "," << format_double(row.record.eb) << ","
                << format_double(x) << "," << format_double(row.record.compression_ratio) << "\n";
        }
        for (const auto& fit : report.fits) {
            double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
            for (const auto& row : subset.rows) {
                if (row.record.eb != fit.eb) continue;
                const double x = row.statistics.at(column);
                if (!std::isfinite(x) || x <= 0.0) continue;
                lo = std::min(lo, x);
                hi = std::max(hi, x);
            }
            if (!(hi >= lo)) continue;
            for (int s = 0; s < 100; ++s) {
                const double x = lo + (hi - lo) * s / 99.0;
                out << "curve," << codec_id << "," << format_double(fit.eb) << ","
                    << format_double(x) << "," << format_double(fit.alpha + fit.beta * std::log(x))
                    << "\n";
            }
        }
        written.push_back(path.string());
    }
    return written;
}

}  // namespace csc
