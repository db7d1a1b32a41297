#ifndef CSC_RECORDS_HPP
#define CSC_RECORDS_HPP

#include <map>
#include <string>
#include <vector>

#include "csc/codec.hpp"

namespace csc {

// Shortest round-trip decimal form (std::to_chars); locale independent.
std::string format_double(double v);

// One records-CSV row: a compression outcome joined with the statistics of
// the original field. Statistics are keyed by their CSV column name.
struct SweepRecord {
    CompressionRecord record;
    std::map<std::string, double> statistics;  // NaN -> empty CSV cell
};

struct RecordsTable {
    std::vector<std::string> stat_columns;  // between max_abs_error and encode_seconds
    std::vector<SweepRecord> rows;
};

// Fixed column order:
//   field_id,codec,eb,original_bytes,compressed_bytes,cr,max_abs_error,
//   <stat columns...>,encode_seconds,decode_seconds
// Timing cells are left empty when include_timings is false so that re-runs
// are byte-identical; measured timings then live in a sidecar.
void write_records_csv(const std::string& path, const RecordsTable& table, bool include_timings);

RecordsTable read_records_csv(const std::string& path);

}  // namespace csc

#endif
