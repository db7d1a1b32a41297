#include "csc/records.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <limits>
#include <sstream>

#include "csc/errors.hpp"

namespace csc {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

namespace {

const std::vector<std::string> kHeadColumns = {
    "field_id", "codec", "eb", "original_bytes", "compressed_bytes", "cr", "max_abs_error"};
const std::vector<std::string> kTailColumns = {"encode_seconds", "decode_seconds"};

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) cells.push_back(cell);
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

double parse_cell(const std::string& cell) {
    if (cell.empty()) return std::numeric_limits<double>::quiet_NaN();
    return std::strtod(cell.c_str(), nullptr);
}

}  // namespace

void write_records_csv(const std::string& path, const RecordsTable& table, bool include_timings) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw input_error("cannot create '" + path + "'");
    for (const auto& c : kHeadColumns) out << (&c == &kHeadColumns.front() ? "" : ",") << c;
    for (const auto& c : table.stat_columns) out << "," << c;
    for (const auto& c : kTailColumns) out << "," << c;
    out << "\n";
    for (const auto& row : table.rows) {
        const auto& r = row.record;
        out << r.field_id << "," << r.codec_id << "," << format_double(r.eb) << ","
            << r.original_bytes << "," << r.compressed_bytes << ","
            << format_double(r.compression_ratio) << "," << format_double(r.max_abs_error);
        for (const auto& c : table.stat_columns) {
            const auto it = row.statistics.find(c);
            out << ",";
            if (it != row.statistics.end() && std::isfinite(it->second)) {
                out << format_double(it->second);
            }
        }
        if (include_timings) {
            out << "," << format_double(r.encode_seconds) << "," << format_double(r.decode_seconds);
        } else {
            out << ",,";
        }
        out << "\n";
    }
    if (!out) throw input_error("short write on '" + path + "'");
}

RecordsTable read_records_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw input_error("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw schema_error("'" + path + "' is empty");
    const std::vector<std::string> header = split_csv_line(line);

    const size_t head_n = kHeadColumns.size(), tail_n = kTailColumns.size();
    if (header.size() < head_n + tail_n) {
        throw schema_error("'" + path + "' has " + std::to_string(header.size()) +
                           " columns; expected at least field_id..max_abs_error plus timing columns");
    }
    for (size_t i = 0; i < head_n; ++i) {
        if (header[i] != kHeadColumns[i]) {
            throw schema_error("'" + path + "' column " + std::to_string(i) + " is '" + header[i] +
                               "', expected '" + kHeadColumns[i] + "'");
        }
    }
    for (size_t i = 0; i < tail_n; ++i) {
        const size_t at = header.size() - tail_n + i;
        if (header[at] != kTailColumns[i]) {
            throw schema_error("'" + path + "' column " + std::to_string(at) + " is '" +
                               header[at] + "', expected '" + kTailColumns[i] + "'");
        }
    }

    RecordsTable table;
    table.stat_columns.assign(header.begin() + head_n, header.end() - tail_n);
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::vector<std::string> cells = split_csv_line(line);
        if (cells.size() != header.size()) {
            throw schema_error("'" + path + "' line " + std::to_string(line_no) + " has " +
                               std::to_string(cells.size()) + " cells, header has " +
                               std::to_string(header.size()));
        }
        SweepRecord row;
        row.record.field_id = cells[0];
        row.record.codec_id = cells[1];
        row.record.eb = parse_cell(cells[2]);
        row.record.original_bytes = static_cast<long long>(parse_cell(cells[3]));
        row.record.compressed_bytes = static_cast<long long>(parse_cell(cells[4]));
        row.record.compression_ratio = parse_cell(cells[5]);
        row.record.max_abs_error = parse_cell(cells[6]);
        for (size_t i = 0; i < table.stat_columns.size(); ++i) {
            row.statistics[table.stat_columns[i]] = parse_cell(cells[head_n + i]);
        }
        row.record.encode_seconds = parse_cell(cells[header.size() - 2]);
        row.record.decode_seconds = parse_cell(cells[header.size() - 1]);
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace csc
