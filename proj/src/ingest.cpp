#include "hybridcover/ingest.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <optional>

#include "hybridcover/error.hpp"

namespace hc {

namespace {

// Splits one CSV line. Double quotes group a field and "" is a literal quote.
std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                field += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(field));
            field.clear();
        } else {
            field += c;
        }
    }
    fields.push_back(std::move(field));
    return fields;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::optional<double> to_double(const std::string& text) {
    const std::string t = trim(text);
    if (t.empty()) return std::nullopt;
    double v = 0.0;
    const char* first = t.data();
    const char* last = t.data() + t.size();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
    return v;
}

struct Columns {
    std::size_t yr, loss, slat, slon, elat, elon, len, wid;
    std::optional<std::size_t> om;
};

Columns locate_columns(const std::vector<std::string>& header) {
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < header.size(); ++i) index.emplace(trim(header[i]), i);
    auto need = [&](const char* name) {
        auto it = index.find(name);
        if (it == index.end()) throw DataError(std::string("missing required column '") + name + "'");
        return it->second;
    };
    Columns c{need("yr"),   need("loss"), need("slat"), need("slon"),
              need("elat"), need("elon"), need("len"),  need("wid"), std::nullopt};
    if (auto it = index.find("om"); it != index.end()) c.om = it->second;
    return c;
}

}  // namespace

ParseReport parse_tornado_csv(std::istream& in) {
    ParseReport report;
    std::string line;
    std::size_t line_no = 0;
    std::optional<Columns> cols;
    std::size_t header_width = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        const auto fields = split_csv(line);
        if (!cols) {
            cols = locate_columns(fields);
            header_width = fields.size();
            continue;
        }
        auto reject = [&](const std::string& reason) {
            report.rejects.push_back({line_no, line, reason});
        };
        if (fields.size() < header_width) {
            reject("expected " + std::to_string(header_width) + " fields, found " +
                   std::to_string(fields.size()));
            continue;
        }
        const std::pair<const char*, std::size_t> numeric[] = {
            {"yr", cols->yr},     {"loss", cols->loss}, {"slat", cols->slat}, {"slon", cols->slon},
            {"elat", cols->elat}, {"elon", cols->elon}, {"len", cols->len},   {"wid", cols->wid}};
        double v[8];
        std::string problem;
        for (std::size_t k = 0; k < 8 && problem.empty(); ++k) {
            const std::string& raw = fields[numeric[k].second];
            if (trim(raw).empty()) {
                problem = std::string("missing ") + numeric[k].first;
            } else if (auto parsed = to_double(raw)) {
                v[k] = *parsed;
            } else {
                problem = std::string("unparseable ") + numeric[k].first + " '" + trim(raw) + "'";
            }
        }
        if (!problem.empty()) {
            reject(problem);
            continue;
        }
        TornadoRecord r;
        if (v[0] != std::floor(v[0])) {
            reject("non-integer yr");
            continue;
        }
        r.year = static_cast<int>(v[0]);
        r.loss = v[1];
        r.slat = v[2];
        r.slon = v[3];
        r.elat = v[4];
        r.elon = v[5];
        r.len = v[6];
        r.wid = v[7];
        r.raw_id = cols->om ? trim(fields[*cols->om]) : std::to_string(line_no);
        if (r.loss < 0.0) {
            reject("negative loss");
            continue;
        }
        if (r.len < 0.0 || r.wid < 0.0) {
            reject("negative len or wid");
            continue;
        }
        // SPC encodes an unknown end point as 0,0.
        if (r.elat == 0.0 && r.elon == 0.0) {
            r.elat = r.slat;
            r.elon = r.slon;
            ++report.end_point_imputed;
        }
        auto lat_ok = [](double lat) { return lat >= 15.0 && lat <= 75.0; };
        auto lon_ok = [](double lon) { return lon >= -180.0 && lon <= 0.0; };
        if (!lat_ok(r.slat) || !lat_ok(r.elat)) {
            reject("latitude out of range");
            continue;
        }
        if (!lon_ok(r.slon) || !lon_ok(r.elon)) {
            reject("longitude out of range");
            continue;
        }
        report.records.push_back(std::move(r));
    }
    if (!cols) throw DataError("tornado table has no header row");
    return report;
}

ParseReport parse_tornado_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open tornado file '" + path + "'");
    return parse_tornado_csv(in);
}

BuildReport build_sample(const std::vector<TornadoRecord>& records, int year_min, int year_max) {
    if (year_min > year_max) throw ConfigError("year_min exceeds year_max");
    BuildReport out;
    out.input_rows = records.size();
    for (const auto& r : records) {
        if (r.year < year_min || r.year > year_max) {
            ++out.outside_years;
            continue;
        }
        if (!(r.loss > 0.0)) {
            ++out.zero_loss;
            continue;
        }
        const double area = r.len * r.wid;
        if (!(area > 0.0)) {
            ++out.zero_area;
            continue;
        }
        const double w[2] = {0.5 * (r.slat + r.elat), 0.5 * (r.slon + r.elon)};
        out.sample.push_back(r.loss / area, w);
        out.years.push_back(r.year);
    }
    if (out.sample.empty()) throw DataError("no tornado rows survive the filters");
    return out;
}

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + "\"";
}

}  // namespace

void write_records_csv(std::ostream& out, const std::vector<TornadoRecord>& records) {
    out << "om,yr,loss,slat,slon,elat,elon,len,wid\n";
    for (const auto& r : records)
        out << quote(r.raw_id) << ',' << r.year << ',' << fmt(r.loss) << ',' << fmt(r.slat) << ','
            << fmt(r.slon) << ',' << fmt(r.elat) << ',' << fmt(r.elon) << ',' << fmt(r.len) << ','
            << fmt(r.wid) << '\n';
}

void write_sample_csv(std::ostream& out, const BuildReport& report) {
    out << "y,w1,w2,year\n";
    for (std::size_t i = 0; i < report.sample.rows(); ++i) {
        auto w = report.sample.w(i);
        out << fmt(report.sample.y(i)) << ',' << fmt(w[0]) << ',' << fmt(w[1]) << ','
            << report.years[i] << '\n';
    }
}

void write_rejects_csv(std::ostream& out, const std::vector<RejectedRow>& rejects) {
    out << "line,reason,raw\n";
    for (const auto& r : rejects) out << r.line << ',' << quote(r.reason) << ',' << quote(r.raw) << '\n';
}

LossSample read_sample_csv(std::istream& in) {
    std::string line;
    std::optional<std::size_t> dim;
    LossSample sample;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty() || line[0] == '#') continue;
        const auto fields = split_csv(line);
        if (!dim) {
            std::size_t d = 0;
            for (std::size_t k = 1; k < fields.size(); ++k)
                if (trim(fields[k]).size() > 1 && trim(fields[k])[0] == 'w') ++d;
            if (trim(fields[0]) != "y" || d == 0)
                throw DataError("sample header must start with y followed by w1..wd");
            dim = d;
            sample = LossSample(d);
            continue;
        }
        if (fields.size() < *dim + 1)
            throw DataError("short row at line " + std::to_string(line_no));
        std::vector<double> values(*dim + 1);
        for (std::size_t k = 0; k <= *dim; ++k) {
            auto v = to_double(fields[k]);
            if (!v) throw DataError("unparseable value at line " + std::to_string(line_no));
            values[k] = *v;
        }
        sample.push_back(values[0], std::span<const double>(values).subspan(1));
    }
    if (!dim) throw DataError("sample file has no header");
    return sample;
}

}  // namespace hc
