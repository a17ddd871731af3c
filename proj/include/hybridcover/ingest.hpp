#pragma once

#include <cstddef>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "hybridcover/sample.hpp"

namespace hc {

// One tornado segment from an SPC-style table. Lengths in miles, widths in yards.
struct TornadoRecord {
    int year = 0;
    double loss = 0.0;
    double slat = 0.0;
    double slon = 0.0;
    double elat = 0.0;
    double elon = 0.0;
    double len = 0.0;
    double wid = 0.0;
    std::string raw_id;

    bool operator==(const TornadoRecord&) const = default;
};

struct RejectedRow {
    std::size_t line = 0;  // 1-based line number in the input
    std::string raw;
    std::string reason;
};

struct ParseReport {
    std::vector<TornadoRecord> records;
    std::vector<RejectedRow> rejects;
    // Rows whose end point was recorded as (0, 0) and replaced by the start point.
    std::size_t end_point_imputed = 0;
};

// Reads a comma-separated table with a header row naming at least yr, loss,
// slat, slon, elat, elon, len and wid (an om column, when present, becomes
// raw_id). A missing column is a DataError; a malformed row is collected in
// the rejects list with its reason.
ParseReport parse_tornado_csv(std::istream& in);
ParseReport parse_tornado_file(const std::string& path);

struct BuildReport {
    LossSample sample{2};
    std::vector<int> years;  // year of each sample row
    std::size_t input_rows = 0;
    std::size_t outside_years = 0;
    std::size_t zero_loss = 0;
    std::size_t zero_area = 0;
};

// y = loss / (len * wid), w = ((slat + elat) / 2, (slon + elon) / 2) for rows
// with year in [year_min, year_max], loss > 0 and len * wid > 0, in input order.
BuildReport build_sample(const std::vector<TornadoRecord>& records, int year_min, int year_max);

void write_records_csv(std::ostream& out, const std::vector<TornadoRecord>& records);
void write_sample_csv(std::ostream& out, const BuildReport& report);
void write_rejects_csv(std::ostream& out, const std::vector<RejectedRow>& rejects);

// Reads "y,w1,...,wd[,year]" CSV (comment lines starting with '#' are skipped).
LossSample read_sample_csv(std::istream& in);

}  // namespace hc
